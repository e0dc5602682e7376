#pragma once

// Consumer utility U(l, h) >= 0 with U(0, .) = 0, supplied as a named
// functional form or a table over a power grid. Power-law forms carry a
// closed-form derivative in l; the others are evaluated pointwise only.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dd {

struct Utility {
    enum class Form { PowerLaw, Indicator, Table };

    Form form = Form::PowerLaw;

    // PowerLaw: scale * h^h_exponent * l^power_exponent
    double scale = 1.0;
    double h_exponent = 1.0;
    double power_exponent = 0.5;

    // Indicator: value * 1{l >= min_power, h >= min_duration}
    double value = 1.0;
    double min_power = 1.0;
    int min_duration = 1;

    // Table: values[pi * horizon + (h-1)] over `powers` x {1..horizon}
    std::vector<double> powers;
    int horizon = 0;
    std::vector<double> values;

    static Utility power_law(double scale, double h_exponent, double power_exponent) {
        if (scale < 0.0) throw std::invalid_argument("utility scale must be >= 0");
        if (!(power_exponent > 0.0))
            throw std::invalid_argument("power exponent must be > 0 so U(0,.) = 0");
        if (h_exponent < 0.0) throw std::invalid_argument("h exponent must be >= 0");
        Utility u;
        u.form = Form::PowerLaw;
        u.scale = scale;
        u.h_exponent = h_exponent;
        u.power_exponent = power_exponent;
        return u;
    }

    static Utility indicator(double value, double min_power, int min_duration) {
        if (value < 0.0) throw std::invalid_argument("indicator value must be >= 0");
        if (!(min_power > 0.0))
            throw std::invalid_argument("indicator min power must be > 0 so U(0,.) = 0");
        if (min_duration < 1) throw std::invalid_argument("indicator min duration must be >= 1");
        Utility u;
        u.form = Form::Indicator;
        u.value = value;
        u.min_power = min_power;
        u.min_duration = min_duration;
        return u;
    }

    static Utility table(std::vector<double> powers, int horizon, std::vector<double> values) {
        if (powers.empty() || horizon < 1 ||
            values.size() != powers.size() * static_cast<std::size_t>(horizon))
            throw std::invalid_argument("utility table has wrong shape");
        if (!std::is_sorted(powers.begin(), powers.end()))
            throw std::invalid_argument("utility table powers must be ascending");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] < 0.0) throw std::invalid_argument("utility table values must be >= 0");
        for (std::size_t i = 0; i < powers.size(); ++i)
            if (powers[i] == 0.0)
                for (int h = 0; h < horizon; ++h)
                    if (values[i * horizon + h] != 0.0)
                        throw std::invalid_argument("utility table must have U(0,.) = 0");
        Utility u;
        u.form = Form::Table;
        u.powers = std::move(powers);
        u.horizon = horizon;
        u.values = std::move(values);
        return u;
    }

    double operator()(double l, int h) const {
        if (l <= 0.0 || h <= 0) return 0.0;
        switch (form) {
            case Form::PowerLaw:
                return scale * std::pow(static_cast<double>(h), h_exponent) *
                       std::pow(l, power_exponent);
            case Form::Indicator:
                return (l >= min_power && h >= min_duration) ? value : 0.0;
            case Form::Table: {
                // Nearest tabulated power at or below l; h clamped to the table.
                const int hh = std::min(h, horizon);
                std::size_t best = 0;
                bool found = false;
                for (std::size_t i = 0; i < powers.size(); ++i)
                    if (powers[i] <= l + 1e-12) {
                        best = i;
                        found = true;
                    } else {
                        break;
                    }
                return found ? values[best * horizon + (hh - 1)] : 0.0;
            }
        }
        return 0.0;
    }

    bool has_derivative() const { return form == Form::PowerLaw; }

    // dU/dl, PowerLaw only.
    double dl(double l, int h) const {
        if (form != Form::PowerLaw) throw std::logic_error("utility form has no derivative");
        if (l <= 0.0 || h <= 0) return 0.0;
        return scale * std::pow(static_cast<double>(h), h_exponent) * power_exponent *
               std::pow(l, power_exponent - 1.0);
    }
};

}  // namespace dd
