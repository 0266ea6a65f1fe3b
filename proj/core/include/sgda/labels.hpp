#pragma once

#include <string>

#include "sgda/errors.hpp"

namespace sgda {

enum class FaultType {
    RotorBarDefect,
    InterTurnShortCircuit,
    BearingOuterRace,
    BearingInnerRace,
    BearingRollingElement,
};

// Class labels for datasets and classifiers. Normal is the healthy class;
// Anomalous is the grouped fault class used by the binary task.
enum class ClassLabel {
    Normal,
    Anomalous,
    RotorBarDefect,
    InterTurnShortCircuit,
    BearingOuterRace,
    BearingInnerRace,
    BearingRollingElement,
};

inline const char* to_string(FaultType t) {
    switch (t) {
        case FaultType::RotorBarDefect: return "rotor_bar_defect";
        case FaultType::InterTurnShortCircuit: return "inter_turn_short_circuit";
        case FaultType::BearingOuterRace: return "bearing_outer_race";
        case FaultType::BearingInnerRace: return "bearing_inner_race";
        case FaultType::BearingRollingElement: return "bearing_rolling_element";
    }
    return "?";
}

inline const char* to_string(ClassLabel l) {
    switch (l) {
        case ClassLabel::Normal: return "normal";
        case ClassLabel::Anomalous: return "anomalous";
        case ClassLabel::RotorBarDefect: return "rotor_bar_defect";
        case ClassLabel::InterTurnShortCircuit: return "inter_turn_short_circuit";
        case ClassLabel::BearingOuterRace: return "bearing_outer_race";
        case ClassLabel::BearingInnerRace: return "bearing_inner_race";
        case ClassLabel::BearingRollingElement: return "bearing_rolling_element";
    }
    return "?";
}

inline ClassLabel to_class_label(FaultType t) {
    switch (t) {
        case FaultType::RotorBarDefect: return ClassLabel::RotorBarDefect;
        case FaultType::InterTurnShortCircuit: return ClassLabel::InterTurnShortCircuit;
        case FaultType::BearingOuterRace: return ClassLabel::BearingOuterRace;
        case FaultType::BearingInnerRace: return ClassLabel::BearingInnerRace;
        case FaultType::BearingRollingElement: return ClassLabel::BearingRollingElement;
    }
    throw ConfigError("unknown fault type");
}

inline FaultType fault_from_string(const std::string& s) {
    if (s == "rotor_bar_defect" || s == "rbd") return FaultType::RotorBarDefect;
    if (s == "inter_turn_short_circuit" || s == "itsc") return FaultType::InterTurnShortCircuit;
    if (s == "bearing_outer_race" || s == "bpfo") return FaultType::BearingOuterRace;
    if (s == "bearing_inner_race" || s == "bpfi") return FaultType::BearingInnerRace;
    if (s == "bearing_rolling_element" || s == "bsf") return FaultType::BearingRollingElement;
    throw ConfigError("unknown fault type: '" + s + "'");
}

inline ClassLabel class_label_from_string(const std::string& s) {
    if (s == "normal") return ClassLabel::Normal;
    if (s == "anomalous") return ClassLabel::Anomalous;
    return to_class_label(fault_from_string(s));
}

}  // namespace sgda
