#pragma once

// CLI11 config adaptor for JSON files. Nested objects map to subcommands:
//   {"seed": 3, "synthetic": {"task": "add", "epochs": 50}}

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace abnn::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static nlohmann::json typed(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) {
      if (s.find_first_not_of("0123456789") == std::string::npos) return std::stoull(s);
      return d;
    }
    return s;
  }

  static nlohmann::json dump(const CLI::App* app, bool default_also) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->get_type_size() == 0) {
        if (opt->count() > 0 || default_also) j[name] = opt->count() > 0;
        continue;
      }
      if (opt->count() > 0) {
        const auto& res = opt->results();
        if (opt->get_expected_max() > 1) {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& r : res) arr.push_back(typed(r));
          j[name] = arr;
        } else {
          j[name] = typed(res.back());
        }
      } else if (default_also && !opt->get_default_str().empty()) {
        const std::string d = opt->get_default_str();
        if (d.size() >= 2 && d.front() == '[' && d.back() == ']') {
          nlohmann::json arr = nlohmann::json::array();
          std::stringstream ss(d.substr(1, d.size() - 2));
          for (std::string v; std::getline(ss, v, ',');) arr.push_back(typed(v));
          j[name] = arr;
        } else {
          j[name] = typed(d);
        }
      }
    }
    for (const CLI::App* sub : app->get_subcommands({}))
      if (sub->parsed()) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }

  static void collect(const nlohmann::json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        CLI::ConfigItem open;
        open.parents = p;
        open.name = "++";
        out.push_back(std::move(open));
        collect(value, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (value.is_string()) {
        item.inputs.push_back(value.get<std::string>());
      } else {
        item.inputs.push_back(value.dump());
      }
      out.push_back(std::move(item));
    }
  }
};

}  // namespace abnn::cli
