#pragma once

#include <optional>
#include <string>

#include "modal_stream/simulate.hpp"
#include "modal_stream/system_model.hpp"

namespace modal_stream {

/// A bundled case study: model plus the simulation defaults it was
/// published with.
struct Fixture {
    std::string name;
    SystemModel model;
    SimulationConfig sim;
    std::vector<ScenarioEvent> events;
};

/// 3-DOF system with closely spaced modes, 2% Rayleigh damping.
Fixture case_study_1();

/// 3-DOF system with non-proportional (indefinite) damping.
Fixture case_study_2();

/// 3-DOF proportionally damped system whose damping matrix switches to the
/// non-proportional one of case study 2 at t = 25 s (50 Hz, 50 s record).
Fixture case_study_3();

/// Extra parameters of the shear-building benchmark appendage.
struct AppendageSpec {
    double mass = 172.6;        // kg
    double stiffness = 6.8e6;   // N/m
    double damping_ratio = 0.02;
};

/// Full 12-DOF shear-building benchmark model (13-DOF with the appendage
/// attached to the top-story weak-direction DOF). Stiffness entries are
/// converted from MN/m to N/m; damping is 1% Rayleigh.
SystemModel benchmark_model(std::optional<AppendageSpec> appendage = {});

/// Weak-direction (y) reduction of the benchmark: 4 DOF, or 5 with the
/// appendage. Floor translational masses are direction-independent for the
/// symmetric configuration, so the reduction reuses the per-floor
/// translational masses.
SystemModel benchmark_y_reduced(std::optional<AppendageSpec> appendage = {});

/// Benchmark run defaults (dt = 0.002 s, 50 s, 150 N excitation).
Fixture benchmark_fixture(bool with_appendage);

/// Look up a bundled fixture by CLI name (cs1, cs2, cs3, benchmark,
/// benchmark-noapp). Throws Error for unknown names.
Fixture fixture_by_name(const std::string& name);

/// Load a model from a flat key-value file (keys: n, mass, damping,
/// stiffness as row-major lists; optional rayleigh.zeta / rayleigh.modes).
Fixture load_fixture_file(const std::string& path);

}  // namespace modal_stream
