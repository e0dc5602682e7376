#pragma once

// Scenario ingestion from JSON and machine-readable report emission.
// Parse errors carry the field path so malformed files are diagnosable.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dd/market.hpp"
#include "dd/spotcompare.hpp"
#include "dd/types.hpp"
#include "dd/utility.hpp"

namespace dd {

using json = nlohmann::json;

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One input file drives every subcommand; optional sections are only
// required by the operations that use them.
struct Scenario {
    int horizon = 0;
    std::optional<Population> population;
    std::optional<SupplyTimeProfile> supply;
    std::optional<double> unit_cost;      // procurement c
    std::optional<double> backstop_cost;  // C, informational here; spot carries its own
    std::optional<ContractGrid> grid;
    std::optional<Utility> utility;              // shared default
    std::vector<std::optional<Utility>> class_utilities;
    std::optional<SpotScenario> spot;
    std::vector<std::vector<int>> slot_selection;  // day-ahead choices, 1-based

    // Utilities resolved per class: the class override or the default.
    std::vector<Utility> resolved_utilities() const {
        if (!population) throw ScenarioError("scenario: no classes defined");
        std::vector<Utility> out;
        for (std::size_t i = 0; i < population->classes.size(); ++i) {
            if (i < class_utilities.size() && class_utilities[i])
                out.push_back(*class_utilities[i]);
            else if (utility)
                out.push_back(*utility);
            else
                throw ScenarioError("scenario: class " + population->classes[i].id +
                                    " has no utility and no default is set");
        }
        return out;
    }
};

namespace ioutil {

inline double round12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline json num(double x) { return json(round12(x)); }

inline json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ScenarioError("scenario: missing field " + path + "." + key);
    return j.at(key);
}

inline double get_num(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ScenarioError("scenario: " + path + "." + key + " must be a number");
    return v.get<double>();
}

inline int get_int(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number_integer())
        throw ScenarioError("scenario: " + path + "." + key + " must be an integer");
    return v.get<int>();
}

inline std::string get_str(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) throw ScenarioError("scenario: " + path + "." + key + " must be a string");
    return v.get<std::string>();
}

inline std::vector<double> get_num_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ScenarioError("scenario: " + path + " must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ScenarioError("scenario: " + path + "[" + std::to_string(i) +
                                "] must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

}  // namespace ioutil

inline Utility parse_utility(const json& j, const std::string& path) {
    using namespace ioutil;
    const std::string form = get_str(j, "form", path);
    try {
        if (form == "power_law")
            return Utility::power_law(get_num(j, "scale", path), get_num(j, "h_exponent", path),
                                      get_num(j, "power_exponent", path));
        if (form == "indicator")
            return Utility::indicator(get_num(j, "value", path), get_num(j, "min_power", path),
                                      get_int(j, "min_duration", path));
        if (form == "table") {
            auto powers = get_num_array(require(j, "powers", path), path + ".powers");
            const int horizon = get_int(j, "horizon", path);
            auto values = get_num_array(require(j, "values", path), path + ".values");
            return Utility::table(std::move(powers), horizon, std::move(values));
        }
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("scenario: " + path + ": " + e.what());
    }
    throw ScenarioError("scenario: " + path + ".form must be power_law, indicator or table");
}

inline SupplyDistribution parse_distribution(const json& j, const std::string& path) {
    using namespace ioutil;
    const std::string kind = get_str(j, "kind", path);
    try {
        if (kind == "discrete")
            return SupplyDistribution::discrete(
                get_num_array(require(j, "values", path), path + ".values"),
                get_num_array(require(j, "probs", path), path + ".probs"));
        if (kind == "uniform")
            return SupplyDistribution::uniform(get_num(j, "lo", path), get_num(j, "hi", path));
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("scenario: " + path + ": " + e.what());
    }
    throw ScenarioError("scenario: " + path + ".kind must be discrete or uniform");
}

inline Scenario parse_scenario(const json& root) {
    using namespace ioutil;
    Scenario sc;
    sc.horizon = get_int(root, "T", "$");
    if (sc.horizon < 1) throw ScenarioError("scenario: $.T must be >= 1");

    if (root.contains("classes")) {
        const json& arr = root.at("classes");
        if (!arr.is_array() || arr.empty())
            throw ScenarioError("scenario: $.classes must be a non-empty array");
        std::vector<ClassSpec> specs;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.classes[" + std::to_string(i) + "]";
            ClassSpec s;
            s.mass = get_num(arr[i], "mass", path);
            s.power = get_num(arr[i], "power", path);
            s.duration = get_int(arr[i], "duration", path);
            if (arr[i].contains("id")) s.id = get_str(arr[i], "id", path);
            specs.push_back(std::move(s));
            if (arr[i].contains("utility")) {
                sc.class_utilities.resize(i + 1);
                sc.class_utilities[i] = parse_utility(arr[i].at("utility"), path + ".utility");
            }
        }
        sc.class_utilities.resize(specs.size());
        try {
            sc.population = make_population(sc.horizon, specs);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario: $.classes: ") + e.what());
        }
    }

    if (root.contains("supply")) {
        auto q = get_num_array(root.at("supply"), "$.supply");
        if (static_cast<int>(q.size()) != sc.horizon)
            throw ScenarioError("scenario: $.supply must have T entries");
        try {
            sc.supply = make_supply_time_profile(std::move(q));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario: $.supply: ") + e.what());
        }
    }

    if (root.contains("costs")) {
        const json& cj = root.at("costs");
        if (cj.contains("c")) sc.unit_cost = get_num(cj, "c", "$.costs");
        if (cj.contains("C")) sc.backstop_cost = get_num(cj, "C", "$.costs");
    }

    if (root.contains("grid")) {
        auto powers = get_num_array(require(root.at("grid"), "powers", "$.grid"), "$.grid.powers");
        try {
            sc.grid = make_contract_grid(std::move(powers));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario: $.grid: ") + e.what());
        }
    }

    if (root.contains("utility")) sc.utility = parse_utility(root.at("utility"), "$.utility");

    if (root.contains("slot_selection")) {
        const json& arr = root.at("slot_selection");
        if (!arr.is_array()) throw ScenarioError("scenario: $.slot_selection must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto nums =
                get_num_array(arr[i], "$.slot_selection[" + std::to_string(i) + "]");
            std::vector<int> slots;
            for (double v : nums) slots.push_back(static_cast<int>(v));
            sc.slot_selection.push_back(std::move(slots));
        }
    }

    if (root.contains("spot")) {
        const json& sj = root.at("spot");
        SpotScenario sp;
        sp.horizon = sj.contains("T") ? get_int(sj, "T", "$.spot") : sc.horizon;
        sp.dist = parse_distribution(require(sj, "distribution", "$.spot"), "$.spot.distribution");
        sp.c = get_num(sj, "c", "$.spot");
        sp.C = get_num(sj, "C", "$.spot");
        if (sj.contains("arrivals")) {
            sp.arrivals = get_num_array(sj.at("arrivals"), "$.spot.arrivals");
        } else {
            sp.arrivals.assign(sp.horizon, 1.0 / sp.horizon);
        }
        sp.u = parse_utility(require(sj, "utility", "$.spot"), "$.spot.utility");
        try {
            validate(sp);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario: $.spot: ") + e.what());
        }
        sc.spot = std::move(sp);
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("scenario: cannot open " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario: " + path + ": " + e.what());
    }
    return parse_scenario(root);
}

// Minimal CSV writer; every number is rendered with 12 significant digits.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) {
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        columns_ = header.size();
    }

    void row(const std::vector<json>& cells) {
        if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            if (cells[i].is_number_float())
                out_ << ioutil::fmt12(cells[i].get<double>());
            else if (cells[i].is_string())
                out_ << cells[i].get<std::string>();
            else
                out_ << cells[i].dump();
        }
        out_ << "\n";
    }

    std::string str() const { return out_.str(); }

  private:
    std::ostringstream out_;
    std::size_t columns_ = 0;
};

}  // namespace dd
