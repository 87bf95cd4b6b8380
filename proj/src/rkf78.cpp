#include "agasim/rkf78.hpp"

#include <set>

namespace agasim {

void IntegratorSettings::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("integrator field '") + field + "' " + what);
        }
    };
    require(rel_tol > 0.0, "rel_tol", "must be positive");
    require(abs_tol > 0.0, "abs_tol", "must be positive");
    require(h_min > 0.0, "h_min", "must be positive");
    require(h_init >= h_min, "h_init", "must be >= h_min");
    require(h_max >= h_init, "h_max", "must be >= h_init");
    require(max_steps > 0, "max_steps", "must be positive");
    require(event_time_tol > 0.0, "event_time_tol", "must be positive");
}

IntegratorSettings integrator_from_json(const nlohmann::json& j, IntegratorSettings base)
{
    if (!j.is_object()) {
        throw std::invalid_argument("'integrator' must be a JSON object");
    }
    static const std::set<std::string, std::less<>> keys = {
        "rel_tol", "abs_tol", "h_init", "h_min", "h_max", "max_steps", "event_time_tol", "adaptive",
    };
    for (const auto& [key, value] : j.items()) {
        if (!keys.contains(key)) {
            throw std::invalid_argument("unknown integrator key '" + key + "'");
        }
    }
    try {
        auto take = [&j](const char* key, double& dst) {
            if (j.contains(key)) {
                dst = j.at(key).get<double>();
            }
        };
        take("rel_tol", base.rel_tol);
        take("abs_tol", base.abs_tol);
        take("h_init", base.h_init);
        take("h_min", base.h_min);
        take("h_max", base.h_max);
        take("event_time_tol", base.event_time_tol);
        if (j.contains("max_steps")) {
            const auto& v = j.at("max_steps");
            if (!v.is_number_integer() || v.get<long long>() <= 0) {
                throw std::invalid_argument("integrator field 'max_steps' must be a positive integer");
            }
            base.max_steps = v.get<std::size_t>();
        }
        if (j.contains("adaptive")) {
            base.adaptive = j.at("adaptive").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("integrator settings have a mistyped field: ") + e.what());
    }
    base.validate();
    return base;
}

nlohmann::json integrator_to_json(const IntegratorSettings& s)
{
    return {
        {"rel_tol", s.rel_tol},
        {"abs_tol", s.abs_tol},
        {"h_init", s.h_init},
        {"h_min", s.h_min},
        {"h_max", s.h_max},
        {"max_steps", s.max_steps},
        {"event_time_tol", s.event_time_tol},
        {"adaptive", s.adaptive},
    };
}

} // namespace agasim
