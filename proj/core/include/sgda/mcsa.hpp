#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgda/labels.hpp"

namespace sgda {

struct BearingGeometry {
    int n_elements = 0;
    double ball_diameter_m = 0.0;
    double pitch_diameter_m = 0.0;
    double contact_angle_rad = 0.0;

    void validate() const;  // throws ConfigError with a field-path message
};

struct MotorParams {
    double supply_frequency_hz = 0.0;        // f1
    double slip = 0.0;                       // s in [0, 1)
    int pole_pairs = 1;                      // p
    std::optional<double> rotor_frequency_hz;  // f_r; derived as f1*(1-s)/p when absent
    double sampling_rate_hz = 0.0;
    std::optional<BearingGeometry> bearing;
    std::optional<int> rotor_bar_count;      // nameplate metadata, unused by the formulas
    std::string name;

    void validate() const;
    double rotor_frequency() const;          // stored value or the slip-derived one
    double nyquist_hz() const { return sampling_rate_hz / 2.0; }
};

struct HarmonicOrders {
    std::vector<int> rotor_orders = {1, 2, 3};
    std::vector<int> itsc_k = {1, 3};        // odd supply-harmonic multipliers
    std::vector<int> itsc_m = {1, 2, 3};     // sideband orders

    void validate() const;
};

// Characteristic frequencies for one fault, sorted ascending, restricted to
// (0, Nyquist). `dropped` counts candidates that fell outside the band.
struct FrequencySet {
    FaultType fault{};
    std::vector<double> frequencies_hz;
    std::size_t dropped = 0;
};

struct FaultFrequencyMap {
    std::map<FaultType, FrequencySet> sets;
    std::vector<FaultType> no_inband;  // faults whose every candidate fell out of band
};

// f = f1 * (1 +- 2*n*s) per rotor order n. Requires slip > 0.
FrequencySet rotor_bar_frequencies(const MotorParams& params, const HarmonicOrders& orders);

// f = k*f1 -+ m*f_r over the (k, m) grid.
FrequencySet itsc_frequencies(const MotorParams& params, const HarmonicOrders& orders);

// BPFO / BPFI / BSF from bearing geometry; `fault` selects the formula.
FrequencySet bearing_frequencies(const MotorParams& params, FaultType fault);

FaultFrequencyMap fault_frequency_map(const MotorParams& params,
                                      const std::vector<FaultType>& faults,
                                      const HarmonicOrders& orders);

}  // namespace sgda
