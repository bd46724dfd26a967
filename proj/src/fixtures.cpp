#include "modal_stream/fixtures.hpp"

#include <cmath>

#include "modal_stream/errors.hpp"
#include "modal_stream/keyvalue.hpp"

namespace modal_stream {

namespace {

Mat mat3(std::initializer_list<double> vals) {
    Mat m(3, 3);
    int i = 0;
    for (double v : vals) {
        m(i / 3, i % 3) = v;
        ++i;
    }
    return m;
}

// the non-proportional damping matrix shared by case studies 2 and 3
Mat nonproportional_damping() {
    return mat3({0.1856, 0.2290, -0.9702,
                 0.2290, 0.0308, -0.0297,
                 -0.9702, -0.0297, 0.1241});
}

std::vector<std::string> numbered_labels(const std::string& prefix, int n) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i + 1));
    return labels;
}

}  // namespace

Fixture case_study_1() {
    Fixture f;
    f.name = "cs1";
    f.model.mass = Mat::Zero(3, 3);
    f.model.mass.diagonal() << 1.5, 2.0, 1.3;
    f.model.stiffness = mat3({7, -2, 0, -2, 4, -2, 0, -2, 5});
    // 2% Rayleigh anchored at modes 1 and 3; mode 2 lands near 1.9%
    f.model.damping = rayleigh_damping(f.model.mass, f.model.stiffness, 0.02, {0, 2});
    f.model.dof_labels = numbered_labels("dof", 3);
    f.sim.dt = 0.1;
    f.sim.duration = 500.0;
    f.sim.noise_intensity = 1.0;
    f.sim.ensemble_size = 10;
    return f;
}

Fixture case_study_2() {
    Fixture f;
    f.name = "cs2";
    f.model.mass = Mat::Zero(3, 3);
    f.model.mass.diagonal() << 3.0, 2.0, 1.0;
    f.model.stiffness = mat3({4, -2, 0, -2, 4, -2, 0, -2, 10});
    f.model.damping = nonproportional_damping();
    f.model.dof_labels = numbered_labels("dof", 3);
    f.sim.dt = 0.1;
    f.sim.duration = 500.0;
    f.sim.noise_intensity = 1.0;
    f.sim.ensemble_size = 10;
    return f;
}

Fixture case_study_3() {
    Fixture f;
    f.name = "cs3";
    f.model.mass = Mat::Zero(3, 3);
    f.model.mass.diagonal() << 3.0, 2.0, 2.0;
    f.model.stiffness = mat3({4, -2, 0, -2, 4, -2, 0, -2, 10});
    f.model.damping = rayleigh_damping(f.model.mass, f.model.stiffness, 0.02, {0, 2});
    f.model.dof_labels = numbered_labels("dof", 3);
    f.sim.dt = 0.02;  // 50 Hz
    f.sim.duration = 50.0;
    f.sim.noise_intensity = 1.0;
    f.sim.ensemble_size = 1;
    f.events.push_back({25.0, nonproportional_damping()});
    return f;
}

namespace {

// printed shear-building chains: per floor (strong x, weak y, rotation theta)
constexpr double kFloorMass[4] = {3452.4, 2652.4, 2652.4, 1809.9};   // kg, x and y
constexpr double kThetaMass[4] = {3819.4, 2652.4, 1809.9, 2056.9};   // as printed
constexpr double kStoryX = 106.60e6;   // N/m
constexpr double kStoryY = 67.90e6;    // N/m
constexpr double kStoryT = 232.02e6;   // N m/rad

Mat chain_stiffness(int n, double k) {
    Mat K = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        K(s, s) = (s + 1 < n) ? 2.0 * k : k;
        if (s + 1 < n) {
            K(s, s + 1) = -k;
            K(s + 1, s) = -k;
        }
    }
    return K;
}

Vec y_chain_frequencies() {
    Mat My = Mat::Zero(4, 4);
    for (int s = 0; s < 4; ++s) My(s, s) = kFloorMass[s];
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(chain_stiffness(4, kStoryY), My);
    return es.eigenvalues().cwiseSqrt();
}

}  // namespace

SystemModel benchmark_y_reduced(std::optional<AppendageSpec> appendage) {
    const int n = appendage ? 5 : 4;
    SystemModel model;
    model.mass = Mat::Zero(n, n);
    for (int s = 0; s < 4; ++s) model.mass(s, s) = kFloorMass[s];
    model.stiffness = Mat::Zero(n, n);
    model.stiffness.topLeftCorner(4, 4) = chain_stiffness(4, kStoryY);

    // 1% Rayleigh on the structure, anchored at the first and last y modes
    const Vec omega = y_chain_frequencies();
    Eigen::Matrix2d fit;
    fit << 1.0 / (2.0 * omega(0)), omega(0) / 2.0, 1.0 / (2.0 * omega(3)), omega(3) / 2.0;
    const Eigen::Vector2d ab = fit.colPivHouseholderQr().solve(Eigen::Vector2d(0.01, 0.01));
    model.damping = Mat::Zero(n, n);
    model.damping.topLeftCorner(4, 4) =
        ab(0) * model.mass.topLeftCorner(4, 4) + ab(1) * model.stiffness.topLeftCorner(4, 4);

    model.dof_labels = numbered_labels("y", 4);
    if (appendage) {
        const double ma = appendage->mass;
        const double ka = appendage->stiffness;
        const double ca = 2.0 * appendage->damping_ratio * std::sqrt(ka * ma);
        model.mass(4, 4) = ma;
        model.stiffness(3, 3) += ka;
        model.stiffness(4, 4) = ka;
        model.stiffness(3, 4) = model.stiffness(4, 3) = -ka;
        model.damping(3, 3) += ca;
        model.damping(4, 4) += ca;
        model.damping(3, 4) = model.damping(4, 3) = -ca;
        model.dof_labels.push_back("appendage");
    }
    return model;
}

SystemModel benchmark_model(std::optional<AppendageSpec> appendage) {
    const int n = appendage ? 13 : 12;
    SystemModel model;
    model.mass = Mat::Zero(n, n);
    model.stiffness = Mat::Zero(n, n);
    // DOF layout: (x, y, theta) per floor, floors stacked with stride 3
    for (int s = 0; s < 4; ++s) {
        model.mass(3 * s + 0, 3 * s + 0) = kFloorMass[s];
        model.mass(3 * s + 1, 3 * s + 1) = kFloorMass[s];
        model.mass(3 * s + 2, 3 * s + 2) = kThetaMass[s];
    }
    const Mat Kx = chain_stiffness(4, kStoryX);
    const Mat Ky = chain_stiffness(4, kStoryY);
    const Mat Kt = chain_stiffness(4, kStoryT);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            model.stiffness(3 * a + 0, 3 * b + 0) = Kx(a, b);
            model.stiffness(3 * a + 1, 3 * b + 1) = Ky(a, b);
            model.stiffness(3 * a + 2, 3 * b + 2) = Kt(a, b);
        }
    }
    const Vec omega = y_chain_frequencies();
    Eigen::Matrix2d fit;
    fit << 1.0 / (2.0 * omega(0)), omega(0) / 2.0, 1.0 / (2.0 * omega(3)), omega(3) / 2.0;
    const Eigen::Vector2d ab = fit.colPivHouseholderQr().solve(Eigen::Vector2d(0.01, 0.01));
    model.damping = Mat::Zero(n, n);
    model.damping.topLeftCorner(12, 12) =
        ab(0) * model.mass.topLeftCorner(12, 12) + ab(1) * model.stiffness.topLeftCorner(12, 12);

    model.dof_labels.clear();
    for (int s = 0; s < 4; ++s) {
        model.dof_labels.push_back("x" + std::to_string(s + 1));
        model.dof_labels.push_back("y" + std::to_string(s + 1));
        model.dof_labels.push_back("theta" + std::to_string(s + 1));
    }
    if (appendage) {
        const double ma = appendage->mass;
        const double ka = appendage->stiffness;
        const double ca = 2.0 * appendage->damping_ratio * std::sqrt(ka * ma);
        const int top_y = 10;  // 4th-floor weak-direction DOF
        model.mass(12, 12) = ma;
        model.stiffness(top_y, top_y) += ka;
        model.stiffness(12, 12) = ka;
        model.stiffness(top_y, 12) = model.stiffness(12, top_y) = -ka;
        model.damping(top_y, top_y) += ca;
        model.damping(12, 12) += ca;
        model.damping(top_y, 12) = model.damping(12, top_y) = -ca;
        model.dof_labels.push_back("appendage");
    }
    return model;
}

Fixture benchmark_fixture(bool with_appendage) {
    Fixture f;
    f.name = with_appendage ? "benchmark" : "benchmark-noapp";
    f.model = with_appendage ? benchmark_y_reduced(AppendageSpec{})
                             : benchmark_y_reduced();
    f.sim.dt = 0.002;
    f.sim.duration = 50.0;
    f.sim.noise_intensity = 150.0;
    f.sim.ensemble_size = 5;
    return f;
}

Fixture fixture_by_name(const std::string& name) {
    if (name == "cs1") return case_study_1();
    if (name == "cs2") return case_study_2();
    if (name == "cs3") return case_study_3();
    if (name == "benchmark") return benchmark_fixture(true);
    if (name == "benchmark-noapp") return benchmark_fixture(false);
    throw Error("unknown fixture: " + name);
}

namespace {

Mat mat_from_list(const std::vector<double>& vals, int n, const std::string& key) {
    if (static_cast<int>(vals.size()) != n * n) {
        throw Error("fixture key '" + key + "' must hold n*n values");
    }
    Mat m(n, n);
    for (int i = 0; i < n * n; ++i) m(i / n, i % n) = vals[i];
    return m;
}

}  // namespace

Fixture load_fixture_file(const std::string& path) {
    const KeyValueConfig cfg = KeyValueConfig::from_file(path);
    const int n = static_cast<int>(cfg.get_int("n", 0));
    if (n < 1) throw Error("fixture file must define n >= 1");

    Fixture f;
    f.name = cfg.get_string("name", "fixture");
    f.model.mass = mat_from_list(cfg.get_list("mass"), n, "mass");
    f.model.stiffness = mat_from_list(cfg.get_list("stiffness"), n, "stiffness");
    if (cfg.has("damping")) {
        f.model.damping = mat_from_list(cfg.get_list("damping"), n, "damping");
    } else if (cfg.has("rayleigh.zeta")) {
        const int mi = static_cast<int>(cfg.get_int("rayleigh.mode_i", 1)) - 1;
        const int mj = static_cast<int>(cfg.get_int("rayleigh.mode_j", n)) - 1;
        f.model.damping = rayleigh_damping(f.model.mass, f.model.stiffness,
                                           cfg.get_double("rayleigh.zeta", 0.0), {mi, mj});
    } else {
        f.model.damping = Mat::Zero(n, n);
    }
    f.model.dof_labels = numbered_labels("dof", n);

    f.sim.dt = cfg.get_double("sim.dt", 0.01);
    f.sim.duration = cfg.get_double("sim.duration", 10.0);
    f.sim.noise_intensity = cfg.get_double("sim.noise", 1.0);
    f.sim.seed = static_cast<unsigned long long>(cfg.get_int("sim.seed", 0));
    f.sim.ensemble_size = static_cast<int>(cfg.get_int("sim.ensemble", 1));
    f.model.validate();
    return f;
}

}  // namespace modal_stream
