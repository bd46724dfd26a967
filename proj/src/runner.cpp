#include "modal_stream/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "modal_stream/csv.hpp"
#include "modal_stream/errors.hpp"
#include "modal_stream/manifest.hpp"

namespace modal_stream {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int worker_count() {
    if (const char* env = std::getenv("MODAL_STREAM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

KeyValueConfig default_case_config(const std::string& case_name) {
    KeyValueConfig cfg;
    cfg.set("pipeline.init", "200");
    cfg.set("pipeline.lag_count", "10");
    cfg.set("pipeline.lag_stride", "1");
    cfg.set("pipeline.full_jad_every", "500");
    cfg.set("pipeline.jad_sweeps", "1");
    cfg.set("pipeline.track_mean", "false");
    cfg.set("pipeline.analytic", "streaming");
    cfg.set("pipeline.ht_window", "512");
    cfg.set("pipeline.ht_hop", "128");
    cfg.set("sim.measurement_noise", "0");
    cfg.set("run.baseline", "false");

    if (case_name == "cs1") {
        cfg.set("sim.dt", "0.4");
        cfg.set("sim.duration", "2000");
        cfg.set("sim.noise", "1");
        cfg.set("sim.ensemble", "10");
    } else if (case_name == "cs2") {
        cfg.set("sim.dt", "0.4");
        cfg.set("sim.duration", "2000");
        cfg.set("sim.noise", "1");
        cfg.set("sim.ensemble", "10");
        cfg.set("run.baseline", "true");
    } else if (case_name == "cs3") {
        cfg.set("sim.dt", "0.02");
        cfg.set("sim.duration", "50");
        cfg.set("sim.noise", "1");
        cfg.set("sim.ensemble", "5");
        cfg.set("pipeline.analytic", "batch");
        cfg.set("pipeline.forgetting", "0.995");
        cfg.set("cs3.pre_window", "5 20");
        cfg.set("cs3.post_window", "35 50");
    } else if (case_name == "benchmark" || case_name == "benchmark-noapp") {
        cfg.set("sim.dt", "0.002");
        cfg.set("sim.duration", "50");
        cfg.set("sim.noise", "150");
        cfg.set("sim.ensemble", "5");
        cfg.set("sim.measurement_noise", "0.01");
        cfg.set("pipeline.ht_window", "1024");
        cfg.set("pipeline.ht_hop", "256");
    }
    return cfg;
}

namespace {

PipelineConfig pipeline_config_from(const KeyValueConfig& cfg, int channels,
                                    bool zero_phase_shift) {
    PipelineConfig pc;
    pc.channels = channels;
    pc.init_samples = static_cast<int>(cfg.get_int("pipeline.init", 200));
    pc.lag_stride = static_cast<int>(cfg.get_int("pipeline.lag_stride", 1));
    const int lag_count = static_cast<int>(cfg.get_int("pipeline.lag_count", 10));
    for (int t = 1; t <= lag_count; ++t) pc.lags.push_back(t * pc.lag_stride);
    pc.full_jad_every = static_cast<int>(cfg.get_int("pipeline.full_jad_every", 500));
    pc.jad_sweeps_per_sample = static_cast<int>(cfg.get_int("pipeline.jad_sweeps", 1));
    pc.track_mean = cfg.get_bool("pipeline.track_mean", false);
    pc.ht_window = static_cast<int>(cfg.get_int("pipeline.ht_window", 512));
    pc.ht_hop = static_cast<int>(cfg.get_int("pipeline.ht_hop", 1));
    if (cfg.has("pipeline.forgetting")) {
        pc.forgetting = cfg.get_double("pipeline.forgetting", 0.995);
    }
    pc.demix_analytic = cfg.get_bool("pipeline.demix_analytic", false);
    pc.use_phase_shift = !zero_phase_shift;
    return pc;
}

struct Record {
    Mat response;       // p x N
    double dt = 0.0;
};

Record simulate_member(const Fixture& fixture, const KeyValueConfig& cfg,
                       unsigned long long seed) {
    SimulationConfig sim = fixture.sim;
    sim.dt = cfg.get_double("sim.dt", sim.dt);
    sim.duration = cfg.get_double("sim.duration", sim.duration);
    sim.noise_intensity = cfg.get_double("sim.noise", sim.noise_intensity);
    sim.seed = seed;

    const StateSpaceModel ss = build_state_space(fixture.model);
    Mat excitation = wgn_excitation(sim, fixture.model.dof());

    // benchmark forcing drives only the structure stories, not the appendage
    if (fixture.name.rfind("benchmark", 0) == 0 && fixture.model.dof() == 5) {
        excitation.row(4).setZero();
    }
    Record rec;
    rec.response = simulate(ss, excitation, sim, fixture.events);
    rec.dt = sim.dt;

    const double meas = cfg.get_double("sim.measurement_noise", 0.0);
    if (meas > 0.0) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int ch = 0; ch < rec.response.rows(); ++ch) {
            const double rms = std::sqrt(rec.response.row(ch).squaredNorm() /
                                         rec.response.cols());
            for (int k = 0; k < rec.response.cols(); ++k) {
                rec.response(ch, k) += meas * rms * gauss(rng);
            }
        }
    }
    return rec;
}

Vec window_median(const std::vector<std::pair<double, double>>& series, double t0,
                  double t1) {
    std::vector<double> vals;
    for (const auto& [t, v] : series) {
        if (t >= t0 && t < t1) vals.push_back(v);
    }
    Vec out(1);
    if (vals.empty()) {
        out(0) = -1.0;
        return out;
    }
    std::sort(vals.begin(), vals.end());
    out(0) = vals[vals.size() / 2];
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return -1.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

MemberResult run_member(const Fixture& fixture, const KeyValueConfig& cfg,
                        unsigned long long seed, bool zero_phase_shift) {
    const Record rec = simulate_member(fixture, cfg, seed);
    const int n = static_cast<int>(rec.response.rows());
    const int N = static_cast<int>(rec.response.cols());

    const ModalGroundTruth gt = ground_truth(fixture.model);

    PipelineConfig pc = pipeline_config_from(cfg, n, zero_phase_shift);
    Pipeline pipe(pc);
    pipe.set_reference_modes(gt.real_modes);

    const bool batch_analytic =
        cfg.get_string("pipeline.analytic", "streaming") == "batch";

    std::vector<Vec> modal_series;   // per output, real modal response
    std::vector<std::pair<double, double>> min_collinearity;  // (t, min over modes)
    Mat last_modes;
    std::vector<ModalOutput> outs;

    auto consume = [&](const ModalOutput& out) {
        if (out.status != StepStatus::Ok && out.status != StepStatus::Dormant) return;
        modal_series.push_back(out.modal_response);
        if (out.collinearity.size() > 0) {
            min_collinearity.push_back(
                {out.time_index * rec.dt, out.collinearity.minCoeff()});
        }
        last_modes = out.modes_real;
    };

    if (batch_analytic && !zero_phase_shift) {
        CMat analytic(n, N);
        for (int ch = 0; ch < n; ++ch) {
            analytic.row(ch) = hilbert_batch(rec.response.row(ch)).transpose();
        }
        for (int k = 0; k < N; ++k) {
            ComplexSample s;
            s.time_index = k;
            s.values = analytic.col(k);
            if (auto out = pipe.step_complex(s)) consume(*out);
        }
    } else {
        for (int k = 0; k < N; ++k) {
            for (const ModalOutput& out : pipe.step(rec.response.col(k))) consume(out);
        }
    }

    MemberResult result;
    if (last_modes.size() == 0) throw Error("pipeline produced no output");
    const MacReport report = align_modes(last_modes, gt.real_modes);
    result.modes_final = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        Vec col = last_modes.col(report.assignment[j]);
        if (col.dot(gt.real_modes.col(j)) < 0.0) col = -col;
        result.modes_final.col(j) = col;
    }
    result.per_mode_mac = report.per_mode_mac;
    result.convergence = mac_convergence(pipe.track());

    // identified frequencies from the modal-response PSD peaks
    result.identified_freqs = Vec::Constant(n, -1.0);
    const int count = static_cast<int>(modal_series.size());
    int window = 4096;
    while (window > 64 && count < 2 * window) window /= 2;
    if (count >= 2 * window) {
        for (int j = 0; j < n; ++j) {
            Vec series(count);
            for (int k = 0; k < count; ++k) series(k) = modal_series[k](report.assignment[j]);
            if (series.cwiseAbs().maxCoeff() == 0.0) continue;
            result.identified_freqs(j) = dominant_frequency(psd(series, rec.dt, window));
        }
    }

    if (cfg.has("cs3.pre_window")) {
        const auto pre = cfg.get_list("cs3.pre_window");
        const auto post = cfg.get_list("cs3.post_window");
        if (pre.size() == 2) {
            result.collinearity_pre = window_median(min_collinearity, pre[0], pre[1]);
        }
        if (post.size() == 2) {
            result.collinearity_post = window_median(min_collinearity, post[0], post[1]);
        }
    }
    return result;
}

CaseResult run_case_study(const std::string& case_name, const KeyValueConfig& overrides) {
    KeyValueConfig cfg = default_case_config(case_name);
    cfg.merge_from(overrides);

    const Fixture fixture = case_name == "custom"
                                ? load_fixture_file(cfg.get_string("fixture.path"))
                                : fixture_by_name(case_name);
    const ModalGroundTruth gt = ground_truth(fixture.model);
    const int n = fixture.model.dof();
    const int ensemble = static_cast<int>(cfg.get_int("sim.ensemble", fixture.sim.ensemble_size));
    const unsigned long long base_seed =
        static_cast<unsigned long long>(cfg.get_int("seed", 1));

    CaseResult result;
    result.case_name = case_name;
    result.truth_freqs_hz = gt.natural_freqs_hz;
    result.truth_modes = gt.real_modes;

    // ensemble members are independent; distribute across the worker pool
    const bool baseline = cfg.get_bool("run.baseline", false);
    std::vector<MemberResult> members(ensemble);
    std::vector<MemberResult> base_members(baseline ? ensemble : 0);
    {
        const int workers = std::max(1, std::min(worker_count(), ensemble));
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = next.fetch_add(1); i < ensemble; i = next.fetch_add(1)) {
                        members[i] = run_member(fixture, cfg, base_seed + i, false);
                        if (baseline) {
                            base_members[i] = run_member(fixture, cfg, base_seed + i, true);
                        }
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    result.members = members;

    result.median_mac = Vec(n);
    result.median_identified_freqs = Vec(n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> macs, freqs;
        for (const MemberResult& m : members) {
            macs.push_back(m.per_mode_mac(j));
            if (m.identified_freqs(j) > 0.0) freqs.push_back(m.identified_freqs(j));
        }
        result.median_mac(j) = median_of(macs);
        result.median_identified_freqs(j) = median_of(freqs);
    }
    if (baseline) {
        result.median_mac_baseline = Vec(n);
        for (int j = 0; j < n; ++j) {
            std::vector<double> macs;
            for (const MemberResult& m : base_members) macs.push_back(m.per_mode_mac(j));
            result.median_mac_baseline(j) = median_of(macs);
        }
    }

    // ensemble-averaged mode matrix (members already aligned and sign-fixed)
    result.modes_ensemble_mean = Mat::Zero(n, n);
    for (const MemberResult& m : members) result.modes_ensemble_mean += m.modes_final;
    result.modes_ensemble_mean /= static_cast<double>(ensemble);
    for (int j = 0; j < n; ++j) {
        const double nn = result.modes_ensemble_mean.col(j).norm();
        if (nn > 0.0) result.modes_ensemble_mean.col(j) /= nn;
    }

    // batch SOBI reference on member 0's record
    {
        const Record rec = simulate_member(fixture, cfg, base_seed);
        CMat analytic(n, rec.response.cols());
        for (int ch = 0; ch < n; ++ch) {
            analytic.row(ch) = hilbert_batch(rec.response.row(ch)).transpose();
        }
        std::vector<int> lags;
        const int lag_count = static_cast<int>(cfg.get_int("pipeline.lag_count", 10));
        const int stride = static_cast<int>(cfg.get_int("pipeline.lag_stride", 1));
        for (int t = 1; t <= lag_count; ++t) lags.push_back(t * stride);
        const BatchSobiResult sobi = batch_sobi(analytic, lags);
        const NormalizedModes norm =
            normalize_modes(sobi.mixing, CVec::Zero(n), Vec::Ones(n));
        result.batch_mac = align_modes(norm.modes_real, gt.real_modes).per_mode_mac;
    }

    if (cfg.has("cs3.pre_window")) {
        std::vector<double> pre, post;
        for (const MemberResult& m : members) {
            if (m.collinearity_pre.size() > 0 && m.collinearity_pre(0) >= 0.0) {
                pre.push_back(m.collinearity_pre(0));
            }
            if (m.collinearity_post.size() > 0 && m.collinearity_post(0) >= 0.0) {
                post.push_back(m.collinearity_post(0));
            }
        }
        result.pre_event_collinearity = median_of(pre);
        result.post_event_collinearity = median_of(post);
    }
    return result;
}

namespace {

void write_summary_json(const std::string& path, const CaseResult& result) {
    ordered_json j;
    j["case"] = result.case_name;
    j["truth_freqs_hz"] = std::vector<double>(
        result.truth_freqs_hz.data(), result.truth_freqs_hz.data() + result.truth_freqs_hz.size());
    j["median_mac"] = std::vector<double>(result.median_mac.data(),
                                          result.median_mac.data() + result.median_mac.size());
    if (result.median_mac_baseline.size() > 0) {
        j["median_mac_baseline"] =
            std::vector<double>(result.median_mac_baseline.data(),
                                result.median_mac_baseline.data() + result.median_mac_baseline.size());
    }
    j["batch_mac"] = std::vector<double>(result.batch_mac.data(),
                                         result.batch_mac.data() + result.batch_mac.size());
    j["median_identified_freqs_hz"] = std::vector<double>(
        result.median_identified_freqs.data(),
        result.median_identified_freqs.data() + result.median_identified_freqs.size());
    if (result.pre_event_collinearity >= 0.0) {
        j["collinearity_pre_median"] = result.pre_event_collinearity;
        j["collinearity_post_median"] = result.post_event_collinearity;
    }
    std::ofstream out(path + ".tmp", std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    fs::rename(path + ".tmp", path);
}

}  // namespace

RunArtifacts run_case_with_artifacts(const std::string& case_name,
                                     const KeyValueConfig& overrides,
                                     const std::string& out_dir) {
    KeyValueConfig cfg = default_case_config(case_name);
    cfg.merge_from(overrides);

    const unsigned long long seed = static_cast<unsigned long long>(cfg.get_int("seed", 1));
    const std::string hash = fnv1a_hex(case_name + "\n" + cfg.to_string());
    const std::string run_id =
        case_name + "-seed" + std::to_string(seed) + "-" + hash.substr(0, 8);
    const fs::path dir = fs::path(out_dir) / run_id;
    fs::create_directories(dir);

    RunManifest manifest;
    manifest.run_id = run_id;
    manifest.fixture = case_name;
    manifest.seed = seed;
    for (const auto& [k, v] : cfg.entries()) manifest.config[k] = v;
    manifest.content_hash = hash;
    manifest.status = "running";
    manifest.write((dir / "manifest.json").string());

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const Fixture fixture = case_name == "custom"
                                ? load_fixture_file(cfg.get_string("fixture.path"))
                                : fixture_by_name(case_name);
    const Record rec = simulate_member(fixture, cfg, seed);
    const auto t1 = clock::now();

    const CaseResult result = run_case_study(case_name, overrides);
    const auto t2 = clock::now();

    const int n = fixture.model.dof();
    write_response_csv((dir / "responses.csv").string(), rec.response, rec.dt);

    {
        std::vector<std::string> header;
        for (int j = 0; j < n; ++j) header.push_back("truth_" + std::to_string(j));
        for (int j = 0; j < n; ++j) header.push_back("identified_" + std::to_string(j));
        CsvWriter w((dir / "modes_final.csv").string(), header);
        for (int i = 0; i < n; ++i) {
            std::vector<double> row;
            for (int j = 0; j < n; ++j) row.push_back(result.truth_modes(i, j));
            for (int j = 0; j < n; ++j) row.push_back(result.modes_ensemble_mean(i, j));
            w.row(row);
        }
        w.close();
    }
    {
        std::vector<std::string> header{"k"};
        for (int j = 0; j < n; ++j) header.push_back("mac_mode" + std::to_string(j + 1));
        CsvWriter w((dir / "mac_convergence.csv").string(), header);
        const MacConvergence& conv = result.members[0].convergence;
        for (std::size_t i = 0; i < conv.sample_index.size(); ++i) {
            std::vector<double> row{static_cast<double>(conv.sample_index[i])};
            for (int j = 0; j < conv.per_mode_mac[i].size(); ++j) {
                row.push_back(conv.per_mode_mac[i](j));
            }
            w.row(row);
        }
        w.close();
    }
    {
        int window = 4096;
        while (window > 64 && rec.response.cols() < 2 * window) window /= 2;
        std::vector<std::string> header{"f_hz"};
        for (int ch = 0; ch < n; ++ch) header.push_back("ch" + std::to_string(ch));
        CsvWriter w((dir / "psd_physical.csv").string(), header);
        std::vector<PsdEstimate> psds;
        for (int ch = 0; ch < n; ++ch) psds.push_back(psd(rec.response.row(ch), rec.dt, window));
        for (int k = 0; k < psds[0].frequency.size(); ++k) {
            std::vector<double> row{psds[0].frequency(k)};
            for (int ch = 0; ch < n; ++ch) row.push_back(psds[ch].power(k));
            w.row(row);
        }
        w.close();
    }
    write_summary_json((dir / "summary.json").string(), result);
    const auto t3 = clock::now();

    manifest.files = {"responses.csv", "modes_final.csv", "mac_convergence.csv",
                      "psd_physical.csv", "summary.json"};
    auto ms = [](auto a, auto b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    manifest.timings_ms["simulate"] = ms(t0, t1);
    manifest.timings_ms["identify"] = ms(t1, t2);
    manifest.timings_ms["artifacts"] = ms(t2, t3);
    manifest.status = "complete";
    manifest.write((dir / "manifest.json").string());
    return {dir.string(), result};
}

CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b) {
    const RunManifest ma = RunManifest::from_json_file(dir_a + "/manifest.json");
    const RunManifest mb = RunManifest::from_json_file(dir_b + "/manifest.json");
    if (ma.fixture != mb.fixture) {
        throw Error("cannot compare runs of different fixtures: " + ma.fixture + " vs " +
                    mb.fixture);
    }

    CompareReport report;
    std::ifstream sa(dir_a + "/summary.json"), sb(dir_b + "/summary.json");
    if (!sa || !sb) throw Error("missing summary.json in one of the runs");
    ordered_json ja, jb;
    sa >> ja;
    sb >> jb;
    const auto maca = ja["median_mac"].get<std::vector<double>>();
    const auto macb = jb["median_mac"].get<std::vector<double>>();
    if (maca.size() != macb.size()) throw Error("mode count mismatch between runs");
    report.mac_delta = Vec(maca.size());
    for (std::size_t j = 0; j < maca.size(); ++j) report.mac_delta(j) = macb[j] - maca[j];

    for (const auto& [k, v] : ma.timings_ms) {
        const auto it = mb.timings_ms.find(k);
        if (it != mb.timings_ms.end()) report.timing_delta_ms[k] = it->second - v;
    }

    report.identical_outputs = true;
    for (const std::string& f : ma.files) {
        std::ifstream fa(dir_a + "/" + f, std::ios::binary);
        std::ifstream fb(dir_b + "/" + f, std::ios::binary);
        std::stringstream ba, bb;
        ba << fa.rdbuf();
        bb << fb.rdbuf();
        if (ba.str() != bb.str()) {
            report.identical_outputs = false;
            break;
        }
    }

    std::ostringstream text;
    text << "compare " << ma.run_id << " vs " << mb.run_id << "\n";
    text << "  mac delta:";
    for (int j = 0; j < report.mac_delta.size(); ++j) text << " " << report.mac_delta(j);
    text << "\n  outputs identical: " << (report.identical_outputs ? "yes" : "no") << "\n";
    for (const auto& [k, v] : report.timing_delta_ms) {
        text << "  timing delta " << k << ": " << v << " ms\n";
    }
    report.text = text.str();
    return report;
}

}  // namespace modal_stream
