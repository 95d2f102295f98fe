// SPDX-License-Identifier: Apache-2.0
//
// Configuration ingestion (flat key-value text with dotted sections), seeded
// Monte-Carlo sweeps over scenario axes, and byte-stable CSV persistence.

#ifndef SECURIS_EXPERIMENT_HPP
#define SECURIS_EXPERIMENT_HPP

#include "securis/ao.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace securis {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has non-numeric value '" + s + "'");
    }
}

inline Vec2 parse_vec2(const std::string& s, const std::string& key) {
    std::istringstream is(s);
    double x, y;
    if (!(is >> x >> y)) throw config_error("config: key '" + key + "' needs two numbers");
    std::string rest;
    if (is >> rest) throw config_error("config: key '" + key + "' has trailing content");
    return Vec2(x, y);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

} // namespace detail

inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("config: line " + std::to_string(lineno) + " has empty key or value");
        kv[key] = val;
    }
    return kv;
}

// Every key is optional; anything unset keeps its published default.
inline Scenario scenario_from_config(const std::string& text) {
    const auto kv = parse_config_text(text);
    Scenario sc;
    std::set<std::string> seen;
    auto num = [&](const char* key, double& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        dst = detail::parse_double(it->second, key);
        seen.insert(key);
    };
    auto integer = [&](const char* key, int& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        const double v = detail::parse_double(it->second, key);
        if (v != std::floor(v))
            throw config_error("config: key '" + std::string(key) + "' must be an integer");
        dst = static_cast<int>(v);
        seen.insert(key);
    };
    auto vec = [&](const char* key, Vec2& dst) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        dst = detail::parse_vec2(it->second, key);
        seen.insert(key);
    };
    vec("geometry.user", sc.user_pos);
    vec("geometry.eve", sc.eve_pos);
    vec("geometry.ris", sc.ris_pos);
    num("geometry.uav_alt", sc.uav_alt);
    num("geometry.ris_alt", sc.ris_alt);
    vec("flight.start", sc.start_pos);
    vec("flight.final", sc.final_pos);
    num("flight.period", sc.flight_period);
    num("flight.slot", sc.slot_len);
    num("flight.vmax", sc.v_max);
    integer("ris.nx", sc.ris_nx);
    integer("ris.nz", sc.ris_nz);
    num("ris.spacing", sc.elem_spacing);
    num("radio.ref_gain", sc.ref_gain);
    num("radio.alpha", sc.alpha);
    num("radio.kappa", sc.kappa);
    num("radio.varsigma", sc.varsigma);
    num("radio.noise", sc.noise_power);
    num("power.p_avg", sc.p_avg);
    num("power.p_peak", sc.p_peak);
    num("power.g_avg", sc.g_avg);
    num("power.g_peak", sc.g_peak);
    num("tdma.weight", sc.dl_weight);
    num("rician.ur", sc.rice_ur);
    num("rician.rg", sc.rice_rg);
    num("rician.re", sc.rice_re);
    num("rician.ug", sc.rice_ug);
    num("rician.ue", sc.rice_ue);
    num("rician.gu", sc.rice_gu);
    num("rician.ru", sc.rice_ru);
    num("rician.gr", sc.rice_gr);
    num("rician.ge", sc.rice_ge);
    num("csi.delta_a", sc.delta_a);
    num("algorithm.eps_conv", sc.eps_conv);
    integer("algorithm.j_max", sc.j_max);
    for (const auto& [key, val] : kv)
        if (!seen.count(key)) throw config_error("config: unknown key '" + key + "'");
    sc.validate();
    return sc;
}

inline std::string dump_config(const Scenario& sc) {
    using detail::fmt_double;
    std::ostringstream os;
    auto put = [&](const char* key, const std::string& v) { os << key << " = " << v << "\n"; };
    auto put2 = [&](const char* key, const Vec2& v) {
        os << key << " = " << fmt_double(v.x()) << " " << fmt_double(v.y()) << "\n";
    };
    put2("geometry.user", sc.user_pos);
    put2("geometry.eve", sc.eve_pos);
    put2("geometry.ris", sc.ris_pos);
    put("geometry.uav_alt", fmt_double(sc.uav_alt));
    put("geometry.ris_alt", fmt_double(sc.ris_alt));
    put2("flight.start", sc.start_pos);
    put2("flight.final", sc.final_pos);
    put("flight.period", fmt_double(sc.flight_period));
    put("flight.slot", fmt_double(sc.slot_len));
    put("flight.vmax", fmt_double(sc.v_max));
    put("ris.nx", std::to_string(sc.ris_nx));
    put("ris.nz", std::to_string(sc.ris_nz));
    put("ris.spacing", fmt_double(sc.elem_spacing));
    put("radio.ref_gain", fmt_double(sc.ref_gain));
    put("radio.alpha", fmt_double(sc.alpha));
    put("radio.kappa", fmt_double(sc.kappa));
    put("radio.varsigma", fmt_double(sc.varsigma));
    put("radio.noise", fmt_double(sc.noise_power));
    put("power.p_avg", fmt_double(sc.p_avg));
    put("power.p_peak", fmt_double(sc.p_peak));
    put("power.g_avg", fmt_double(sc.g_avg));
    put("power.g_peak", fmt_double(sc.g_peak));
    put("tdma.weight", fmt_double(sc.dl_weight));
    put("rician.ur", fmt_double(sc.rice_ur));
    put("rician.rg", fmt_double(sc.rice_rg));
    put("rician.re", fmt_double(sc.rice_re));
    put("rician.ug", fmt_double(sc.rice_ug));
    put("rician.ue", fmt_double(sc.rice_ue));
    put("rician.gu", fmt_double(sc.rice_gu));
    put("rician.ru", fmt_double(sc.rice_ru));
    put("rician.gr", fmt_double(sc.rice_gr));
    put("rician.ge", fmt_double(sc.rice_ge));
    put("csi.delta_a", fmt_double(sc.delta_a));
    put("algorithm.eps_conv", fmt_double(sc.eps_conv));
    put("algorithm.j_max", std::to_string(sc.j_max));
    return os.str();
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_config(buf.str());
}

enum class SweepAxis { flight_period, delta_a2, dl_weight, p_avg };

inline const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::flight_period: return "T";
        case SweepAxis::delta_a2: return "deltaA2";
        case SweepAxis::dl_weight: return "w";
        case SweepAxis::p_avg: return "Pbar";
    }
    return "?";
}

inline std::optional<SweepAxis> axis_from_name(const std::string& s) {
    if (s == "T") return SweepAxis::flight_period;
    if (s == "deltaA2") return SweepAxis::delta_a2;
    if (s == "w") return SweepAxis::dl_weight;
    if (s == "Pbar") return SweepAxis::p_avg;
    return std::nullopt;
}

// Average/peak powers stay locked at the 1:4 ratio when swept.
inline Scenario apply_axis(Scenario sc, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::flight_period: sc.flight_period = value; break;
        case SweepAxis::delta_a2: sc.delta_a = std::sqrt(value); break;
        case SweepAxis::dl_weight: sc.dl_weight = value; break;
        case SweepAxis::p_avg:
            sc.p_avg = value;
            sc.p_peak = 4.0 * value;
            sc.g_avg = value;
            sc.g_peak = 4.0 * value;
            break;
    }
    sc.validate();
    return sc;
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::delta_a2;
    std::vector<double> values;
    int realizations = 1;
    std::uint64_t base_seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::jo};

    void validate() const {
        if (values.empty()) throw config_error("sweep: values must be non-empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] <= values[i - 1])
                throw config_error("sweep: values must be strictly increasing");
        if (realizations < 1) throw config_error("sweep: realizations must be >= 1");
        if (algorithms.empty()) throw config_error("sweep: no algorithms selected");
    }
};

struct ResultRow {
    std::string algorithm;
    std::string axis;
    double value = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    double secrecy_rate = 0.0;
    int iterations = 0;
    double wall_ms = 0.0; // informational only, never serialized
    std::vector<double> trace;
    std::vector<Vec2> trajectory;
    double slot_len = 0.0;
};

inline ResultRow run_single(const Scenario& sc, Algorithm alg, std::uint64_t seed,
                            const AoOptions& opt, const std::string& axis, double value) {
    ResultRow row;
    row.algorithm = algorithm_name(alg);
    row.axis = axis;
    row.value = value;
    row.seed = seed;
    row.slot_len = sc.slot_len;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const ChannelRealization real = sample_realization(sc, seed);
        AoResult res = run_jo(sc, real, alg, seed, opt);
        row.secrecy_rate = res.report.secrecy_rate;
        row.iterations = res.report.iterations;
        row.trace = res.report.trace;
        row.trajectory = res.design.trajectory.pos;
    } catch (const solver_failure& e) {
        row.status = "failed:" + e.stage;
    } catch (const std::exception&) {
        row.status = "failed:setup";
    }
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

// Every (value, realization, algorithm) cell runs independently; cells may run
// on worker threads, output order is canonical regardless.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec, const Scenario& base,
                                        const AoOptions& opt = {}, int threads = 1) {
    spec.validate();
    struct Cell {
        int vi;
        int ri;
        Algorithm alg;
    };
    std::vector<Cell> cells;
    for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi)
        for (int ri = 0; ri < spec.realizations; ++ri)
            for (Algorithm alg : spec.algorithms) cells.push_back({vi, ri, alg});
    std::vector<ResultRow> rows(cells.size());
    AoOptions cell_opt = opt;
    if (threads > 1) cell_opt.threads = 1;
    detail::parallel_slots(static_cast<int>(cells.size()), threads, [&](int idx) {
        const Cell& c = cells[idx];
        const Scenario sc = apply_axis(base, spec.axis, spec.values[c.vi]);
        rows[idx] = run_single(sc, c.alg, spec.base_seed + c.ri, cell_opt,
                               axis_name(spec.axis), spec.values[c.vi]);
    });
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.algorithm < b.algorithm;
    });
    return rows;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw config_error("emit: cannot open '" + p.string() + "' for writing");
    out << content;
    if (!out) throw config_error("emit: write failed for '" + p.string() + "'");
}

} // namespace detail

// summary.csv plus per-run trajectory and trace files. Trace/trajectory file
// names follow trajectory_<alg>_<seed>.csv; sweeps over several axis values
// add a v<index> infix to keep names unique.
inline std::vector<std::filesystem::path> emit_results(const std::vector<ResultRow>& rows,
                                                       const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> written;
    std::set<double> values;
    for (const auto& r : rows) values.insert(r.value);
    std::map<double, int> value_index;
    int vi = 0;
    for (double v : values) value_index[v] = vi++;
    const bool multi = values.size() > 1;

    std::ostringstream summary;
    summary << "algorithm,axis,value,seed,status,secrecy_rate,iterations\n";
    for (const auto& r : rows) {
        summary << r.algorithm << "," << r.axis << "," << detail::fmt_double(r.value) << ","
                << r.seed << "," << r.status << "," << detail::fmt_double(r.secrecy_rate) << ","
                << r.iterations << "\n";
    }
    const fs::path spath = dir / "summary.csv";
    detail::write_file(spath, summary.str());
    written.push_back(spath);

    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        const std::string infix =
            multi ? "_v" + std::to_string(value_index.at(r.value)) : std::string();
        {
            std::ostringstream os;
            os << "n,x,y,speed\n";
            for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
                const double speed =
                    i == 0 ? 0.0 : (r.trajectory[i] - r.trajectory[i - 1]).norm() / r.slot_len;
                os << (i + 1) << "," << detail::fmt_double(r.trajectory[i].x()) << ","
                   << detail::fmt_double(r.trajectory[i].y()) << "," << detail::fmt_double(speed)
                   << "\n";
            }
            const fs::path p =
                dir / ("trajectory_" + r.algorithm + infix + "_" + std::to_string(r.seed) + ".csv");
            detail::write_file(p, os.str());
            written.push_back(p);
        }
        {
            std::ostringstream os;
            os << "j,secrecy_rate\n";
            for (std::size_t j = 0; j < r.trace.size(); ++j)
                os << j << "," << detail::fmt_double(r.trace[j]) << "\n";
            const fs::path p =
                dir / ("trace_" + r.algorithm + infix + "_" + std::to_string(r.seed) + ".csv");
            detail::write_file(p, os.str());
            written.push_back(p);
        }
    }
    return written;
}

} // namespace securis

#endif
