#include "sgda/mcsa.hpp"

#include <algorithm>
#include <cmath>

#include "sgda/errors.hpp"

namespace sgda {

namespace {

constexpr double kHalfPi = 1.570796326796896619231321691639751442;
constexpr double kDedupToleranceHz = 1e-9;

// Sort, deduplicate within tolerance, and restrict to (0, Nyquist).
FrequencySet finalize(FaultType fault, std::vector<double> candidates, double nyquist_hz) {
    FrequencySet out;
    out.fault = fault;
    std::sort(candidates.begin(), candidates.end());
    for (double f : candidates) {
        if (f <= 0.0 || f >= nyquist_hz) {
            ++out.dropped;
            continue;
        }
        if (!out.frequencies_hz.empty() &&
            std::abs(f - out.frequencies_hz.back()) <= kDedupToleranceHz) {
            continue;
        }
        out.frequencies_hz.push_back(f);
    }
    return out;
}

}  // namespace

void BearingGeometry::validate() const {
    if (n_elements < 1) throw ConfigError("bearing.n_elements: must be a positive integer");
    if (ball_diameter_m <= 0.0) throw ConfigError("bearing.ball_diameter_m: must be > 0");
    if (pitch_diameter_m <= 0.0) throw ConfigError("bearing.pitch_diameter_m: must be > 0");
    if (ball_diameter_m >= pitch_diameter_m)
        throw ConfigError("bearing.ball_diameter_m: must be smaller than pitch_diameter_m");
    if (contact_angle_rad < 0.0 || contact_angle_rad >= kHalfPi)
        throw ConfigError("bearing.contact_angle_rad: must lie in [0, pi/2)");
    if ((ball_diameter_m / pitch_diameter_m) * std::cos(contact_angle_rad) >= 1.0)
        throw ConfigError("bearing: (ball/pitch)*cos(beta) must be < 1");
}

void MotorParams::validate() const {
    if (!(supply_frequency_hz > 0.0)) throw ConfigError("motor.supply_frequency_hz: must be > 0");
    if (!(sampling_rate_hz > 2.0 * supply_frequency_hz))
        throw ConfigError("motor.sampling_rate_hz: must exceed 2 * supply_frequency_hz");
    if (!(slip >= 0.0 && slip < 1.0)) throw ConfigError("motor.slip: must lie in [0, 1)");
    if (pole_pairs < 1) throw ConfigError("motor.pole_pairs: must be a positive integer");
    if (rotor_frequency_hz && !(*rotor_frequency_hz > 0.0))
        throw ConfigError("motor.rotor_frequency_hz: must be > 0 when given");
    if (bearing) bearing->validate();
}

double MotorParams::rotor_frequency() const {
    if (rotor_frequency_hz) return *rotor_frequency_hz;
    return supply_frequency_hz * (1.0 - slip) / static_cast<double>(pole_pairs);
}

void HarmonicOrders::validate() const {
    if (rotor_orders.empty()) throw ConfigError("orders.rotor: must be nonempty");
    for (int n : rotor_orders)
        if (n < 1) throw ConfigError("orders.rotor: entries must be positive integers");
    if (itsc_k.empty()) throw ConfigError("orders.itsc_k: must be nonempty");
    for (int k : itsc_k) {
        if (k < 1) throw ConfigError("orders.itsc_k: entries must be positive integers");
        if (k % 2 == 0) throw ConfigError("orders.itsc_k: entries must be odd");
    }
    if (itsc_m.empty()) throw ConfigError("orders.itsc_m: must be nonempty");
    for (int m : itsc_m)
        if (m < 1) throw ConfigError("orders.itsc_m: entries must be positive integers");
}

FrequencySet rotor_bar_frequencies(const MotorParams& params, const HarmonicOrders& orders) {
    params.validate();
    orders.validate();
    if (params.slip == 0.0)
        throw DataError("zero slip: sidebands degenerate onto f1");

    std::vector<double> candidates;
    candidates.reserve(orders.rotor_orders.size() * 2);
    for (int n : orders.rotor_orders) {
        const double offset = 2.0 * static_cast<double>(n) * params.slip;
        candidates.push_back(params.supply_frequency_hz * (1.0 - offset));
        candidates.push_back(params.supply_frequency_hz * (1.0 + offset));
    }
    return finalize(FaultType::RotorBarDefect, std::move(candidates), params.nyquist_hz());
}

FrequencySet itsc_frequencies(const MotorParams& params, const HarmonicOrders& orders) {
    params.validate();
    orders.validate();
    const double fr = params.rotor_frequency();

    std::vector<double> candidates;
    candidates.reserve(orders.itsc_k.size() * orders.itsc_m.size() * 2);
    for (int k : orders.itsc_k) {
        const double base = static_cast<double>(k) * params.supply_frequency_hz;
        for (int m : orders.itsc_m) {
            const double side = static_cast<double>(m) * fr;
            candidates.push_back(base - side);
            candidates.push_back(base + side);
        }
    }
    return finalize(FaultType::InterTurnShortCircuit, std::move(candidates), params.nyquist_hz());
}

FrequencySet bearing_frequencies(const MotorParams& params, FaultType fault) {
    params.validate();
    if (!params.bearing) throw DataError("bearing geometry missing from motor parameters");
    const BearingGeometry& g = *params.bearing;

    const double fr = params.rotor_frequency();
    const double ratio = (g.ball_diameter_m / g.pitch_diameter_m) * std::cos(g.contact_angle_rad);
    const double n = static_cast<double>(g.n_elements);

    double f = 0.0;
    switch (fault) {
        case FaultType::BearingOuterRace:
            f = 0.5 * n * fr * (1.0 - ratio);
            break;
        case FaultType::BearingInnerRace:
            f = 0.5 * n * fr * (1.0 + ratio);
            break;
        case FaultType::BearingRollingElement:
            f = (g.pitch_diameter_m / (2.0 * g.ball_diameter_m)) * fr * (1.0 - ratio * ratio);
            break;
        default:
            throw DataError(std::string("not a bearing fault: ") + to_string(fault));
    }
    return finalize(fault, {f}, params.nyquist_hz());
}

FaultFrequencyMap fault_frequency_map(const MotorParams& params,
                                      const std::vector<FaultType>& faults,
                                      const HarmonicOrders& orders) {
    if (faults.empty()) throw ConfigError("fault set: must be nonempty");

    FaultFrequencyMap out;
    for (FaultType fault : faults) {
        FrequencySet set;
        try {
            switch (fault) {
                case FaultType::RotorBarDefect:
                    set = rotor_bar_frequencies(params, orders);
                    break;
                case FaultType::InterTurnShortCircuit:
                    set = itsc_frequencies(params, orders);
                    break;
                default:
                    set = bearing_frequencies(params, fault);
                    break;
            }
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("[") + to_string(fault) + "] " + e.what());
        } catch (const DataError& e) {
            throw DataError(std::string("[") + to_string(fault) + "] " + e.what());
        }
        if (set.frequencies_hz.empty()) {
            out.no_inband.push_back(fault);
        } else {
            out.sets.emplace(fault, std::move(set));
        }
    }
    return out;
}

}  // namespace sgda
