// SPDX-License-Identifier: Apache-2.0
//
// txbeam - transmit beamspace design and direction finding for colocated MIMO radar
// Copyright (C) 2026 txbeam contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "txbeam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "txbeam/design.hpp"
#include "txbeam/doa.hpp"
#include "txbeam/rng.hpp"
#include "txbeam/rotation.hpp"
#include "txbeam/sim.hpp"

namespace txbeam
{

namespace
{

// Random stream layout: geometry uses (geometry_seed, 0); design rounding for
// method m uses (seed, 1 + m); trial t of SNR point s for method m uses
// (seed, 1000 + (m * n_snr + s) * trials + t). Method ids are fixed, so
// adding or removing a method never shifts another method's draws. "rotated"
// and "mixed" derive from the joint design and draw from the joint stream.
constexpr std::uint64_t DESIGN_STREAM_BASE = 1;
constexpr std::uint64_t TRIAL_STREAM_BASE = 1000;

arma::uword method_id(const std::string &name)
{
    if (name == "traditional")
        return 0;
    if (name == "joint")
        return 1;
    if (name == "sdd")
        return 2;
    if (name == "mixed")
        return 3;
    if (name == "rotated")
        return 4;
    throw std::invalid_argument("unknown method '" + name +
                                "'; expected traditional, joint, sdd, rotated or mixed");
}

std::string trim(const std::string &s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        b++;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        e--;
    return s.substr(b, e - b);
}

std::string lower(std::string s)
{
    for (char &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::size_t b = 0;
    for (;;)
    {
        const std::size_t e = s.find(sep, b);
        if (e == std::string::npos)
        {
            out.push_back(trim(s.substr(b)));
            return out;
        }
        out.push_back(trim(s.substr(b, e - b)));
        b = e + 1;
    }
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value)
{
    throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
}

double parse_num(const std::string &key, const std::string &value)
{
    const std::string t = trim(value);
    if (t.empty())
        bad_value(key, value);
    char *end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        bad_value(key, value);
    return v;
}

std::uint64_t parse_u64(const std::string &key, const std::string &value)
{
    const std::string t = trim(value);
    if (t.empty() || t[0] == '-' || t[0] == '+')
        bad_value(key, value);
    char *end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        bad_value(key, value);
    return v;
}

arma::uword parse_count(const std::string &key, const std::string &value)
{
    return static_cast<arma::uword>(parse_u64(key, value));
}

std::vector<double> parse_list(const std::string &key, const std::string &value)
{
    const std::string t = trim(value);
    if (t.empty() || lower(t) == "none")
        return {};
    std::vector<double> out;
    for (const std::string &tok : split(t, ','))
        out.push_back(parse_num(key, tok));
    return out;
}

// Either "start:step:stop" (inclusive) or a comma-separated list
std::vector<double> parse_axis(const std::string &key, const std::string &value)
{
    const std::string t = trim(value);
    if (t.find(':') == std::string::npos)
        return parse_list(key, value);
    const std::vector<std::string> parts = split(t, ':');
    if (parts.size() != 3)
        bad_value(key, value);
    const double start = parse_num(key, parts[0]);
    const double step = parse_num(key, parts[1]);
    const double stop = parse_num(key, parts[2]);
    if (step == 0.0 || (stop - start) / step < -1e-9)
        bad_value(key, value);
    const auto count = static_cast<arma::uword>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (arma::uword i = 0; i < count; i++)
        out.push_back(start + step * static_cast<double>(i));
    return out;
}

std::vector<Sector> parse_sectors(const std::string &key, const std::string &value)
{
    std::vector<Sector> out;
    for (const std::string &tok : split(trim(value), ','))
    {
        const std::vector<std::string> lh = split(tok, ':');
        if (lh.size() != 2)
            bad_value(key, value);
        out.push_back({parse_num(key, lh[0]), parse_num(key, lh[1])});
    }
    return out;
}

arma::cx_mat parse_mixing(const std::string &key, const std::string &value)
{
    const std::string t = trim(value);
    if (t.empty() || lower(t) == "none")
        return {};
    std::istringstream is(t);
    std::vector<arma::cx_double> vals;
    std::string tok;
    while (is >> tok)
    {
        const std::vector<std::string> reim = split(tok, ',');
        if (reim.size() != 2)
            bad_value(key, value);
        vals.emplace_back(parse_num(key, reim[0]), parse_num(key, reim[1]));
    }
    const auto k = static_cast<arma::uword>(std::llround(std::sqrt(static_cast<double>(vals.size()))));
    if (k == 0 || k * k != vals.size())
        throw std::invalid_argument("config: key '" + key + "' needs a square number of re,im entries");
    arma::cx_mat u(k, k);
    arma::uword i = 0;
    for (arma::uword c = 0; c < k; c++)
        for (arma::uword r = 0; r < k; r++)
            u(r, c) = vals[i++];
    return u;
}

std::string join_list(const std::vector<double> &v)
{
    if (v.empty())
        return "none";
    std::string out;
    for (std::size_t i = 0; i < v.size(); i++)
    {
        if (i)
            out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::string join_sectors(const std::vector<Sector> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); i++)
    {
        if (i)
            out += ",";
        out += format_double(v[i].lo_deg) + ":" + format_double(v[i].hi_deg);
    }
    return out;
}

std::string join_mixing(const arma::cx_mat &u)
{
    if (u.is_empty())
        return "none";
    std::string out;
    for (arma::uword c = 0; c < u.n_cols; c++)
        for (arma::uword r = 0; r < u.n_rows; r++)
        {
            if (c || r)
                out += " ";
            out += format_double(u(r, c).real()) + "," + format_double(u(r, c).imag());
        }
    return out;
}

std::uint64_t fnv1a64(const std::string &s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

arma::uword effective_threads(const ExperimentConfig &cfg)
{
    if (cfg.threads != 0)
        return cfg.threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc != 0 ? hc : 1;
}

// Dynamic work distribution; results must go into per-index slots so the
// schedule cannot influence them
void parallel_for(arma::uword n, arma::uword threads, const std::function<void(arma::uword)> &body)
{
    if (threads <= 1 || n <= 1)
    {
        for (arma::uword i = 0; i < n; i++)
            body(i);
        return;
    }
    std::atomic<arma::uword> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;)
        {
            const arma::uword i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                const std::lock_guard<std::mutex> lock(err_mutex);
                if (!err)
                    err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const arma::uword spawn = std::min(threads, n);
    pool.reserve(spawn);
    for (arma::uword i = 0; i < spawn; i++)
        pool.emplace_back(worker);
    for (std::thread &th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace

ExperimentConfig::ExperimentConfig()
    : spec({{-10.0, 10.0}}, 0.0), targets_deg{-5.0, 5.0}, methods{"joint"}
{
    for (int s = -10; s <= 20; s += 2)
        snr_db.push_back(static_cast<double>(s));
}

void ExperimentConfig::validate() const
{
    if (tx_elements < 2)
        throw std::invalid_argument("config: array.tx_elements must be at least 2");
    if (!(tx_spacing > 0.0))
        throw std::invalid_argument("config: array.tx_spacing must be positive");
    if (rx_elements < 2)
        throw std::invalid_argument("config: array.rx_elements must be at least 2");
    if (!(rx_aperture > 0.0))
        throw std::invalid_argument("config: array.rx_aperture must be positive");
    if (spec.sectors.empty())
        throw std::invalid_argument("config: sector.sectors must not be empty");
    SectorSpec(spec.sectors, spec.level); // structural checks (ordering, overlap, range)
    if (!(total_power > 0.0))
        throw std::invalid_argument("config: design.total_power must be positive");
    if (waveforms != 0)
    {
        if (waveforms < 2 || waveforms % 2 != 0)
            throw std::invalid_argument("config: design.waveforms must be even and at least 2");
        if (waveforms > tx_elements)
            throw std::invalid_argument("config: design.waveforms must not exceed array.tx_elements");
    }
    if (!(energy_fraction > 0.0 && energy_fraction <= 1.0))
        throw std::invalid_argument("config: design.energy_fraction must lie in (0, 1]");
    if (grid_points < 2)
        throw std::invalid_argument("config: design.grid_points must be at least 2");
    if (!(sdp_tol > 0.0))
        throw std::invalid_argument("config: design.sdp_tol must be positive");
    if (candidates < 1)
        throw std::invalid_argument("config: design.candidates must be at least 1");
    if (!mixing.is_empty() && mixing.n_rows != mixing.n_cols)
        throw std::invalid_argument("config: design.mixing must be square");
    if (targets_deg.empty())
        throw std::invalid_argument("config: scene.targets must not be empty");
    for (double a : targets_deg)
        if (!(a >= -90.0 && a <= 90.0))
            throw std::invalid_argument("config: scene.targets must lie in [-90, 90]");
    if (resolution_targets_deg.size() == 1)
        throw std::invalid_argument("config: scene.resolution_targets needs at least two angles");
    for (double a : resolution_targets_deg)
        if (!(a >= -90.0 && a <= 90.0))
            throw std::invalid_argument("config: scene.resolution_targets must lie in [-90, 90]");
    if (!(beta_var > 0.0))
        throw std::invalid_argument("config: scene.beta_var must be positive");
    if (pulses < 1)
        throw std::invalid_argument("config: scene.pulses must be at least 1");
    if (methods.empty())
        throw std::invalid_argument("config: run.methods must not be empty");
    for (const std::string &m : methods)
    {
        method_id(m);
        if (m == "mixed" && mixing.is_empty())
            throw std::invalid_argument("config: method 'mixed' needs design.mixing");
        if (m == "traditional" && tx_elements % 2 != 0)
            throw std::invalid_argument("config: method 'traditional' needs an even element count");
        if (m == "rotated" && resolve_waveforms(*this) < 4)
            throw std::invalid_argument("config: method 'rotated' needs at least four waveforms");
    }
    if (snr_db.empty())
        throw std::invalid_argument("config: run.snr_db must not be empty");
    if (trials < 1)
        throw std::invalid_argument("config: run.trials must be at least 1");
}

std::string ExperimentConfig::canonical_string() const
{
    std::ostringstream os;
    os << "[array]\n";
    os << "tx_elements = " << tx_elements << "\n";
    os << "tx_spacing = " << format_double(tx_spacing) << "\n";
    os << "rx_elements = " << rx_elements << "\n";
    os << "rx_aperture = " << format_double(rx_aperture) << "\n";
    os << "geometry_seed = " << geometry_seed << "\n";
    os << "\n[sector]\n";
    os << "sectors = " << join_sectors(spec.sectors) << "\n";
    os << "level = " << format_double(spec.level) << "\n";
    os << "\n[design]\n";
    os << "total_power = " << format_double(total_power) << "\n";
    os << "waveforms = " << waveforms << "\n";
    os << "energy_fraction = " << format_double(energy_fraction) << "\n";
    os << "grid_points = " << grid_points << "\n";
    os << "sdp_tol = " << format_double(sdp_tol) << "\n";
    os << "candidates = " << candidates << "\n";
    os << "mixing = " << join_mixing(mixing) << "\n";
    os << "\n[scene]\n";
    os << "targets = " << join_list(targets_deg) << "\n";
    os << "resolution_targets = " << join_list(resolution_targets_deg) << "\n";
    os << "beta_var = " << format_double(beta_var) << "\n";
    os << "pulses = " << pulses << "\n";
    os << "\n[run]\n";
    os << "methods = ";
    for (std::size_t i = 0; i < methods.size(); i++)
        os << (i ? "," : "") << methods[i];
    os << "\n";
    os << "snr_db = " << join_list(snr_db) << "\n";
    os << "trials = " << trials << "\n";
    os << "seed = " << seed << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_string()); }

std::string ExperimentConfig::hash_hex() const
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

ExperimentConfig ExperimentConfig::parse(std::istream &is)
{
    ExperimentConfig cfg;
    std::string line;
    std::string section;
    arma::uword line_no = 0;

    auto fail = [&](const std::string &what) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(is, line))
    {
        line_no++;
        const std::size_t cut = line.find_first_of(";#");
        if (cut != std::string::npos)
            line.resize(cut);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                fail("unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "array" && section != "sector" && section != "design" && section != "scene" &&
                section != "run")
                fail("unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail("expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;

        try
        {
            if (full == "array.tx_elements")
                cfg.tx_elements = parse_count(full, value);
            else if (full == "array.tx_spacing")
                cfg.tx_spacing = parse_num(full, value);
            else if (full == "array.rx_elements")
                cfg.rx_elements = parse_count(full, value);
            else if (full == "array.rx_aperture")
                cfg.rx_aperture = parse_num(full, value);
            else if (full == "array.geometry_seed")
                cfg.geometry_seed = parse_u64(full, value);
            else if (full == "sector.sectors")
                cfg.spec.sectors = parse_sectors(full, value);
            else if (full == "sector.level")
                cfg.spec.level = parse_num(full, value);
            else if (full == "design.total_power")
                cfg.total_power = parse_num(full, value);
            else if (full == "design.waveforms")
                cfg.waveforms = parse_count(full, value);
            else if (full == "design.energy_fraction")
                cfg.energy_fraction = parse_num(full, value);
            else if (full == "design.grid_points")
                cfg.grid_points = parse_count(full, value);
            else if (full == "design.sdp_tol")
                cfg.sdp_tol = parse_num(full, value);
            else if (full == "design.candidates")
                cfg.candidates = parse_count(full, value);
            else if (full == "design.mixing")
                cfg.mixing = parse_mixing(full, value);
            else if (full == "scene.targets")
                cfg.targets_deg = parse_list(full, value);
            else if (full == "scene.resolution_targets")
                cfg.resolution_targets_deg = parse_list(full, value);
            else if (full == "scene.beta_var")
                cfg.beta_var = parse_num(full, value);
            else if (full == "scene.pulses")
                cfg.pulses = parse_count(full, value);
            else if (full == "run.methods")
            {
                cfg.methods.clear();
                for (const std::string &m : split(value, ','))
                    cfg.methods.push_back(lower(m));
            }
            else if (full == "run.snr_db")
                cfg.snr_db = parse_axis(full, value);
            else if (full == "run.trials")
                cfg.trials = parse_count(full, value);
            else if (full == "run.seed")
                cfg.seed = parse_u64(full, value);
            else if (full == "run.threads")
                cfg.threads = parse_count(full, value);
            else
                fail("unknown key '" + full + "'");
        }
        catch (const std::invalid_argument &e)
        {
            if (std::string(e.what()).rfind("config line", 0) == 0)
                throw;
            fail(e.what());
        }
    }

    cfg.spec = SectorSpec(cfg.spec.sectors, cfg.spec.level);
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("config: cannot open '" + path + "'");
    return parse(is);
}

namespace
{

arma::cx_mat pinned_mixing_2x2()
{
    arma::cx_mat u(2, 2);
    u(0, 0) = {0.6925, 0.3994};
    u(0, 1) = {0.4903, 0.3468};
    u(1, 0) = {-0.4755, 0.3669};
    u(1, 1) = {0.6753, -0.4279};
    // published to four decimals only; relift onto the unitary group
    return nearest_unitary(u);
}

// Common in-sector target of the pinned studies: 15 dB in beam-domain power,
// the peak level the designs are compared at.
double study_level() { return std::pow(10.0, 1.5); }

} // namespace

ExperimentConfig ExperimentConfig::example1()
{
    ExperimentConfig cfg;
    cfg.spec = SectorSpec({{-10.0, 10.0}}, study_level());
    cfg.targets_deg = {-5.0, 5.0};
    cfg.resolution_targets_deg = {};
    cfg.methods = {"joint", "mixed"};
    cfg.mixing = pinned_mixing_2x2();
    return cfg;
}

ExperimentConfig ExperimentConfig::example2()
{
    ExperimentConfig cfg;
    cfg.spec = SectorSpec({{-40.0, -20.0}, {30.0, 50.0}}, study_level());
    cfg.targets_deg = {-33.0, 41.0};
    cfg.resolution_targets_deg = {38.0, 40.0};
    cfg.methods = {"traditional", "rotated", "sdd"};
    return cfg;
}

ExperimentConfig ExperimentConfig::example3()
{
    ExperimentConfig cfg;
    cfg.spec = SectorSpec({{-10.0, 0.0}}, study_level());
    cfg.targets_deg = {-7.0, -2.0};
    cfg.resolution_targets_deg = {-3.0, -1.0};
    cfg.methods = {"traditional", "joint"};
    return cfg;
}

ExperimentConfig ExperimentConfig::example4()
{
    ExperimentConfig cfg;
    cfg.spec = SectorSpec({{-15.0, 15.0}}, study_level());
    cfg.targets_deg = {-12.0, 9.0};
    cfg.resolution_targets_deg = {-3.0, -1.0};
    cfg.methods = {"traditional", "rotated"};
    return cfg;
}

BeamspaceMatrix traditional_mimo(arma::uword antennas, double total_power)
{
    if (antennas < 1)
        throw std::invalid_argument("traditional_mimo: need at least one antenna");
    if (!(total_power > 0.0))
        throw std::invalid_argument("traditional_mimo: total power must be positive");
    arma::cx_mat w(antennas, antennas, arma::fill::eye);
    w *= std::sqrt(total_power / static_cast<double>(antennas));
    return {std::move(w), total_power};
}

ReceiveArray configured_receive_array(const ExperimentConfig &cfg)
{
    RngStream rng(cfg.geometry_seed, 0);
    return random_receive_array(cfg.rx_elements, cfg.rx_aperture, rng);
}

arma::uword resolve_waveforms(const ExperimentConfig &cfg)
{
    if (cfg.waveforms != 0)
        return cfg.waveforms;
    const TransmitArray tx(cfg.tx_elements, cfg.tx_spacing);
    return select_waveform_count(tx, cfg.spec, cfg.energy_fraction).waveforms;
}

MethodDesign design_for_method(const ExperimentConfig &cfg, const std::string &method)
{
    cfg.validate();
    const arma::uword id = method_id(method);
    const TransmitArray tx(cfg.tx_elements, cfg.tx_spacing);

    MethodDesign out;
    out.method = method;

    if (method == "traditional")
    {
        out.matrix = traditional_mimo(cfg.tx_elements, cfg.total_power);
        return out;
    }

    const arma::uword k = resolve_waveforms(cfg);
    const AngularGrid grid = AngularGrid::full(cfg.grid_points);
    SdpOptions opts;
    opts.tol = cfg.sdp_tol;

    if (method == "sdd")
    {
        RngStream rng(cfg.seed, DESIGN_STREAM_BASE + id);
        BeamspaceDesign d = design_sdd(tx, cfg.spec, grid, k, cfg.total_power, cfg.candidates, rng, opts);
        out.objective = d.rounded_objective;
        out.sdp_delta = d.sdp_delta;
        out.matrix = std::move(d.matrix);
        return out;
    }

    // "rotated" and "mixed" both refine the joint design, so all three draw
    // from the joint stream and share one base matrix
    RngStream rng(cfg.seed, DESIGN_STREAM_BASE + method_id("joint"));
    BeamspaceDesign d = design_joint(tx, cfg.spec, grid, k, cfg.total_power, cfg.candidates, rng, opts);
    out.objective = d.rounded_objective;
    out.sdp_delta = d.sdp_delta;
    out.matrix = std::move(d.matrix);
    if (method == "rotated")
    {
        const RotationProblem rp = build_rotation_problem(out.matrix, tx, cfg.spec);
        const RotationResult rr = optimize_rotation(rp);
        out.matrix = apply_rotation(out.matrix, rr.u);
        out.rotated = true;
    }
    else if (method == "mixed")
    {
        if (cfg.mixing.n_rows != k)
            throw std::invalid_argument("design_for_method: mixing matrix size must match the waveform count");
        out.matrix = right_multiply(out.matrix, cfg.mixing);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg, ExperimentKind kind)
{
    cfg.validate();

    const std::vector<double> &scene_targets =
        kind == ExperimentKind::resolution ? cfg.resolution_targets_deg : cfg.targets_deg;
    if (kind == ExperimentKind::resolution && scene_targets.size() < 2)
        throw std::invalid_argument("run_experiment: resolution run needs scene.resolution_targets");

    std::vector<double> truth = scene_targets;
    std::sort(truth.begin(), truth.end());
    const arma::uword nl = truth.size();

    const TransmitArray tx(cfg.tx_elements, cfg.tx_spacing);
    const ReceiveArray rx = configured_receive_array(cfg);
    const AngularGrid scan = scan_grid(cfg.spec);
    const arma::uword n_snr = cfg.snr_db.size();
    const arma::uword threads = effective_threads(cfg);

    ExperimentResult res;
    res.kind = kind;
    res.config_hash = cfg.hash();
    res.trials = cfg.trials;

    for (const std::string &method : cfg.methods)
    {
        MethodCurve curve;
        try
        {
            curve.design = design_for_method(cfg, method);
        }
        catch (const std::exception &e)
        {
            throw std::runtime_error("run_experiment: design for method '" + method + "' failed: " + e.what());
        }
        const BeamspaceMatrix &w = curve.design.matrix;
        const PhaseProfile profile =
            kind == ExperimentKind::rmse ? build_phase_profile(w, tx, cfg.spec) : PhaseProfile{};

        curve.snr_db = arma::vec(cfg.snr_db);
        curve.value.set_size(n_snr);
        curve.failures.zeros(n_snr);

        const arma::uword mid = method_id(method);
        for (arma::uword s = 0; s < n_snr; s++)
        {
            const double noise_var = cfg.beta_var * std::pow(10.0, -cfg.snr_db[s] / 10.0);
            const TargetScene scene(truth, cfg.beta_var, noise_var, cfg.pulses);

            struct Slot
            {
                double sq_sum = 0.0;
                arma::uword terms = 0;
                bool hit = false;
                bool failed = false;
            };
            std::vector<Slot> slots(cfg.trials);

            parallel_for(cfg.trials, threads, [&](arma::uword t) {
                const std::uint64_t stream =
                    TRIAL_STREAM_BASE + (mid * n_snr + s) * static_cast<std::uint64_t>(cfg.trials) + t;
                RngStream rng(cfg.seed, stream);
                const SnapshotSet snap = simulate(scene, w, tx, rx, rng);
                Slot &slot = slots[t];
                try
                {
                    if (kind == ExperimentKind::rmse)
                    {
                        const auto halves = accumulate_halves(snap);
                        std::unique_ptr<MusicEvaluator> ev;
                        const SpectrumEvaluator disambig = [&](double angle) {
                            if (!ev)
                                ev = std::make_unique<MusicEvaluator>(snap, w, tx, rx, nl);
                            return (*ev)(angle);
                        };
                        const EspritEstimate est = estimate_esprit(halves.first, halves.second, nl, profile, disambig);
                        for (arma::uword l = 0; l < nl; l++)
                        {
                            const double err = est.angles_deg[l] - truth[l];
                            slot.sq_sum += err * err;
                        }
                        slot.terms = nl;
                    }
                    else
                    {
                        const MusicEvaluator ev(snap, w, tx, rx, nl);
                        const MusicSpectrum spectrum = music_spectrum(ev, scan);
                        slot.hit = resolved(music_estimate(spectrum, nl), truth);
                    }
                }
                catch (const std::exception &)
                {
                    slot.failed = true;
                }
            });

            // sequential reduction keeps the result schedule-independent
            double sq_sum = 0.0;
            arma::uword terms = 0, hits = 0, failures = 0;
            for (const Slot &slot : slots)
            {
                if (slot.failed)
                {
                    failures++;
                    continue;
                }
                sq_sum += slot.sq_sum;
                terms += slot.terms;
                hits += slot.hit ? 1 : 0;
            }
            curve.failures[s] = failures;
            if (kind == ExperimentKind::rmse)
                curve.value[s] = terms > 0 ? std::sqrt(sq_sum / static_cast<double>(terms)) : arma::datum::nan;
            else
                curve.value[s] = static_cast<double>(hits) / static_cast<double>(cfg.trials);
        }
        res.curves.push_back(std::move(curve));
    }
    return res;
}

std::string curve_csv(const ExperimentResult &res)
{
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(res.config_hash));

    std::ostringstream os;
    os << "# config=" << hash << "\n";
    os << "method,snr_db," << (res.kind == ExperimentKind::rmse ? "rmse_deg" : "probability") << ",trials,failures\n";
    for (const MethodCurve &curve : res.curves)
        for (arma::uword s = 0; s < curve.snr_db.n_elem; s++)
            os << curve.design.method << "," << format_double(curve.snr_db[s]) << "," << format_double(curve.value[s])
               << "," << res.trials << "," << curve.failures[s] << "\n";
    return os.str();
}

std::string beampattern_csv(const BeamspaceMatrix &bm, const TransmitArray &tx, std::uint64_t config_hash,
                            const AngularGrid &grid)
{
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash));

    const arma::vec total = beampattern(bm, tx, grid);
    const arma::mat per = beampattern_per_waveform(bm, tx, grid);

    std::ostringstream os;
    os << "# config=" << hash << "\n";
    os << "theta_deg,total";
    for (arma::uword k = 0; k < bm.waveforms(); k++)
        os << ",wf" << (k + 1);
    os << "\n";
    for (arma::uword q = 0; q < grid.points(); q++)
    {
        os << format_double(grid.deg[q]) << "," << format_double(total[q]);
        for (arma::uword k = 0; k < per.n_cols; k++)
            os << "," << format_double(per(q, k));
        os << "\n";
    }
    return os.str();
}

std::vector<std::string> write_report(const ExperimentResult &res, const ExperimentConfig &cfg,
                                      const std::string &out_dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("write_report: cannot create directory '" + out_dir + "': " + ec.message());

    std::vector<std::string> written;
    auto emit = [&](const std::string &name, const std::string &content) {
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw std::runtime_error("write_report: cannot open '" + p.string() + "' for writing");
        os << content;
        os.flush();
        if (!os)
            throw std::runtime_error("write_report: write to '" + p.string() + "' failed");
        written.push_back(p.string());
    };

    emit(res.kind == ExperimentKind::rmse ? "rmse.csv" : "resolution.csv", curve_csv(res));

    const TransmitArray tx(cfg.tx_elements, cfg.tx_spacing);
    const AngularGrid grid = AngularGrid::full(1801);
    for (const MethodCurve &curve : res.curves)
    {
        emit("beampattern_" + curve.design.method + ".csv",
             beampattern_csv(curve.design.matrix, tx, res.config_hash, grid));
        std::ostringstream ws;
        save_beamspace(curve.design.matrix, ws);
        emit("design_" + curve.design.method + ".txt", ws.str());
    }
    return written;
}

} // namespace txbeam
