// Copyright 2026 The qdev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Batch front end. Everything lives behind run() so tests can drive the
// real argument parser and inspect output and exit codes.

#include <cstdio>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "qdev/qdev.hpp"

namespace qdev::cli {

using nlohmann::ordered_json;

enum ExitCode { kOk = 0, kDomain = 2, kInvariant = 3 };

inline std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// A cell is a JSON scalar: null renders as an empty CSV cell.
inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string render_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_quote(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return fmt(v.get<double>());
}

// Either a table (columns + rows) or a record (nested key/value object).
struct Output {
  std::string config;
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
  std::optional<ordered_json> record;
};

inline void flatten(const ordered_json& v, const std::string& key, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), key.empty() ? it.key() : key + "." + it.key(), out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], key + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(key, render_cell(v));
  }
}

// Floats are rounded to the CSV precision; JSON cannot hold inf, so
// non-finite values become the CSV strings.
inline ordered_json json_cell(const ordered_json& v) {
  if (!v.is_number_float()) return v;
  const double x = v.get<double>();
  if (!std::isfinite(x)) return fmt(x);
  return std::stod(fmt(x));
}

inline ordered_json sanitize(const ordered_json& v) {
  if (v.is_object()) {
    ordered_json o = ordered_json::object();
    for (auto it = v.begin(); it != v.end(); ++it) o[it.key()] = sanitize(it.value());
    return o;
  }
  if (v.is_array()) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(sanitize(x));
    return a;
  }
  return json_cell(v);
}

inline void write_output(const Output& o, const std::string& format, std::ostream& os) {
  if (format == "json") {
    ordered_json j;
    j["config"] = o.config;
    if (o.record) {
      j["result"] = sanitize(*o.record);
    } else {
      j["columns"] = o.columns;
      ordered_json rows = ordered_json::array();
      for (const auto& r : o.rows) {
        ordered_json row = ordered_json::object();
        for (std::size_t c = 0; c < o.columns.size(); ++c) row[o.columns[c]] = json_cell(r[c]);
        rows.push_back(std::move(row));
      }
      j["rows"] = std::move(rows);
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "# " << o.config << '\n';
  if (o.record) {
    std::vector<std::pair<std::string, std::string>> kv;
    flatten(*o.record, "", kv);
    os << "key,value\n";
    for (const auto& [k, v] : kv) os << k << ',' << v << '\n';
    return;
  }
  for (std::size_t c = 0; c < o.columns.size(); ++c) os << (c ? "," : "") << o.columns[c];
  os << '\n';
  for (const auto& r : o.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << render_cell(r[c]);
    os << '\n';
  }
}

// Evaluate f(0..n-1) on worker threads; results keep index order.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) slots[i].emplace(f(i));
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// "3", "2..5", "1,4,6", or a mix such as "2..4,8".
inline std::vector<std::size_t> parse_range(const std::string& spec, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(spec);
  std::string tok;
  auto num = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (s.empty() || pos != s.size() || s[0] == '-') throw DomainError(std::string(what) + ": bad integer '" + s + "'");
    return std::size_t(v);
  };
  while (std::getline(ss, tok, ',')) {
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(num(tok));
      continue;
    }
    const std::size_t lo = num(tok.substr(0, dots)), hi = num(tok.substr(dots + 2));
    if (hi < lo) throw DomainError(std::string(what) + ": empty range '" + tok + "'");
    if (hi - lo > 100000) throw DomainError(std::string(what) + ": range too long");
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw DomainError(std::string(what) + ": empty specification");
  return out;
}

// Receiver spec relative to N: items are integers, ranges, "inf", or "+k"
// meaning N + k.
struct ReceiverItem {
  enum Kind { absolute, relative, infinity } kind = absolute;
  std::size_t value = 0;
};

inline std::vector<ReceiverItem> parse_receivers(const std::string& spec) {
  std::vector<ReceiverItem> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "inf") {
      out.push_back({ReceiverItem::infinity, 0});
    } else if (!tok.empty() && tok[0] == '+') {
      out.push_back({ReceiverItem::relative, parse_range(tok.substr(1), "--M").front()});
    } else {
      for (auto v : parse_range(tok, "--M")) out.push_back({ReceiverItem::absolute, v});
    }
  }
  if (out.empty()) throw DomainError("--M: empty specification");
  return out;
}

inline Receivers resolve(const ReceiverItem& it, std::size_t n) {
  switch (it.kind) {
    case ReceiverItem::infinity: return Receivers::unbounded();
    case ReceiverItem::relative: return Receivers::finite(n + it.value);
    default: return Receivers::finite(it.value);
  }
}

inline ordered_json receivers_cell(Receivers m) {
  return m.infinite ? ordered_json("inf") : ordered_json(m.count);
}

inline Flavor parse_flavor(const std::string& s) {
  if (s == "universal") return Flavor::universal;
  if (s == "phase") return Flavor::phase;
  throw DomainError("unknown flavor '" + s + "' (universal, phase)");
}

// ------------------------------------------------------------------ devices

struct DeviceArgs {
  std::string device = "universal-clone";
  std::string d = "2", n = "1", m = "2";
};

inline const std::vector<std::string>& device_names() {
  static const std::vector<std::string> names{"universal-clone", "phase-clone", "unot", "phase-not"};
  return names;
}

inline Output cmd_fidelity_table(const DeviceArgs& a) {
  const auto ds = parse_range(a.d, "--d");
  const bool cloner = a.device == "universal-clone" || a.device == "phase-clone";
  if (std::find(device_names().begin(), device_names().end(), a.device) == device_names().end()) {
    throw DomainError("unknown device '" + a.device + "'");
  }
  const auto ns = cloner ? parse_range(a.n, "--N") : std::vector<std::size_t>{1};
  const auto ms = cloner ? parse_range(a.m, "--M") : std::vector<std::size_t>{1};
  struct Job {
    std::size_t d, n, m;
  };
  std::vector<Job> jobs;
  for (auto d : ds)
    for (auto n : ns)
      for (auto m : ms) jobs.push_back({d, n, m});
  Output o;
  o.config = "devices fidelity device=" + a.device + " d=" + a.d + (cloner ? " N=" + a.n + " M=" + a.m : "");
  o.columns = {"device", "d", "N", "M", "fidelity", "exact", "error"};
  o.rows = parallel_map(jobs.size(), [&](std::size_t i) {
    const auto [d, n, m] = jobs[i];
    std::vector<ordered_json> row{a.device, d, n, m, nullptr, nullptr, nullptr};
    try {
      std::optional<Rational> q;
      double f = 0;
      CloneSpec s{d, n, m};
      if (a.device == "universal-clone") {
        q = uclone_fidelity_exact(s);
      } else if (a.device == "phase-clone") {
        if (n == 1) q = pclone_fidelity_n1_exact(s);
        f = pclone_fidelity(s);
      } else if (a.device == "unot") {
        q = unot_fidelity_exact(d);
      } else {
        q = phase_not_fidelity_exact(d);
      }
      if (q) {
        f = q->value();
        row[5] = q->den == 1 ? std::to_string(q->num) : std::to_string(q->num) + "/" + std::to_string(q->den);
      }
      row[4] = f;
    } catch (const Error& e) {
      row[6] = e.what();
    }
    return row;
  });
  return o;
}

inline ordered_json check_json(const ChannelCheck& c) {
  return {{"cp", c.cp}, {"tp", c.tp}, {"min_eig", c.min_eig}, {"tp_defect", c.tp_defect}};
}

inline Output cmd_device_build(const DeviceArgs& a) {
  const std::size_t d = parse_range(a.d, "--d").front();
  const std::size_t n = parse_range(a.n, "--N").front(), m = parse_range(a.m, "--M").front();
  ordered_json r;
  r["device"] = a.device;
  r["d"] = d;
  std::optional<ChoiOperator> choi;
  double fid = 0;
  if (a.device == "universal-clone") {
    CloneSpec s{d, n, m};
    choi = uclone_choi(s);
    fid = uclone_fidelity(s);
    r["N"] = n;
    r["M"] = m;
  } else if (a.device == "phase-clone") {
    CloneSpec s{d, n, m};
    choi = pclone_isometry(s).choi();
    fid = pclone_fidelity(s);
    r["N"] = n;
    r["M"] = m;
  } else if (a.device == "unot") {
    choi = unot_choi(d);
    fid = unot_fidelity_exact(d).value();
  } else if (a.device == "phase-not") {
    if (d < 2) throw DomainError("phase-not: d must be >= 2");
    RealMatrix b = RealMatrix::Constant(idx(d), idx(d), 1.0 / double(d - 1));
    b.diagonal().setZero();
    choi = phase_not_choi(NsbMatrix(std::move(b)));
    fid = phase_not_fidelity_exact(d).value();
  } else if (a.device == "superbroadcast") {
    if (d != 2) throw DomainError("superbroadcast: qubits only (d = 2)");
    choi = universal_superbro_choi(n, m);
    r["N"] = n;
    r["M"] = m;
  } else {
    throw DomainError("unknown device '" + a.device + "'");
  }
  if (a.device != "superbroadcast") r["fidelity"] = fid;
  r["check"] = check_json(channel_check(*choi));
  r["choi"] = io::to_json(*choi);
  Output o;
  o.config = "devices build device=" + a.device + " d=" + a.d + " N=" + a.n + " M=" + a.m;
  o.record = std::move(r);
  return o;
}

// --------------------------------------------------------- superbroadcast

inline Output cmd_scaling_curve(const std::string& flavor, std::size_t n, const std::string& mspec, std::size_t grid) {
  const Flavor f = parse_flavor(flavor);
  const auto items = parse_receivers(mspec);
  if (items.size() != 1) throw DomainError("scaling: --M must name a single receiver count");
  const Receivers m = resolve(items.front(), n);
  if (grid < 2) throw DomainError("scaling: --grid must be >= 2");
  Output o;
  o.config = "scaling flavor=" + flavor + " N=" + std::to_string(n) + " M=" + m.str() + " grid=" + std::to_string(grid);
  o.columns = {"flavor", "N", "M", "r", "p", "superbroadcasts"};
  o.rows = parallel_map(grid, [&](std::size_t i) {
    const double r = double(i + 1) / double(grid);
    const auto s = scaling(f, n, m, r);
    return std::vector<ordered_json>{flavor, n, receivers_cell(m), r, s.p, s.superbroadcasts};
  });
  return o;
}

inline Output cmd_rstar(const std::string& flavor, const std::string& nspec, const std::string& mspec) {
  const Flavor f = parse_flavor(flavor);
  const auto ns = parse_range(nspec, "--N");
  const auto items = parse_receivers(mspec);
  std::vector<std::pair<std::size_t, Receivers>> jobs;
  for (auto n : ns)
    for (const auto& it : items) jobs.emplace_back(n, resolve(it, n));
  Output o;
  o.config = "rstar flavor=" + flavor + " N=" + nspec + " M=" + mspec;
  o.columns = {"flavor", "N", "M", "r_star", "error"};
  o.rows = parallel_map(jobs.size(), [&](std::size_t i) {
    const auto [n, m] = jobs[i];
    std::vector<ordered_json> row{flavor, n, receivers_cell(m), nullptr, nullptr};
    try {
      if (auto r = r_star(n, m, f)) row[3] = *r;
    } catch (const Error& e) {
      row[4] = e.what();
    }
    return row;
  });
  return o;
}

// ------------------------------------------------------------------- povm

inline Output cmd_povm_check(const std::string& path) {
  const Povm p = io::povm_from_json(io::read_file(path));
  const auto g = povm_validate(p);
  ordered_json r;
  r["dim"] = g.dim;
  r["outcomes"] = g.outcomes;
  r["valid"] = g.valid;
  r["positive"] = g.positive;
  r["complete"] = g.complete;
  r["hermiticity_defect"] = g.hermiticity_defect;
  r["completeness_defect"] = g.completeness_defect;
  r["min_eigs"] = g.min_eigs;
  if (g.valid) {
    r["rank_one"] = is_postprocessing_clean(p);
    r["observable"] = is_observable(p);
    const auto pre = is_preprocessing_clean(p);
    r["preprocessing_clean"] = pre ? ordered_json(*pre) : ordered_json("undecided");
  }
  Output o;
  o.config = "povm check " + path;
  o.record = std::move(r);
  return o;
}

inline Output cmd_povm_reach(const std::string& ppath, const std::string& qpath) {
  const Povm p = io::povm_from_json(io::read_file(ppath)), q = io::povm_from_json(io::read_file(qpath));
  require_valid(p, "povm reach (P)");
  require_valid(q, "povm reach (Q)");
  const auto res = postprocessing_reachable(p, q);
  ordered_json r;
  r["reachable"] = res.reachable;
  if (res.witness) {
    r["residual"] = res.residual;
    r["witness"] = io::to_json(res.witness->p());
  } else {
    std::vector<double> y(res.certificate.data(), res.certificate.data() + res.certificate.size());
    r["certificate"] = y;
  }
  Output o;
  o.config = "povm reach " + ppath + " " + qpath;
  o.record = std::move(r);
  return o;
}

// ------------------------------------------------------------ decoherence

inline DensityMatrix load_state(const std::string& path, std::size_t d) {
  if (path.empty()) {
    StateVector plus = StateVector::Constant(idx(d), 1.0 / std::sqrt(double(d)));
    return DensityMatrix::pure(plus);
  }
  DensityMatrix rho = io::state_from_json(io::read_file(path));
  if (rho.dim() != d) throw ShapeError("state dimension " + std::to_string(rho.dim()) + " differs from " + std::to_string(d));
  return rho;
}

inline CorrelationMatrix load_xi(const std::string& path, double lambda) {
  if (path.empty()) return phase_kick(lambda);
  const auto j = io::read_file(path);
  return CorrelationMatrix(io::matrix_from_json(j.is_object() ? io::detail::require_field(j, "matrix") : j));
}

inline Output cmd_deco_run(double lambda, std::size_t steps, const std::string& state_path, const std::string& xi_path) {
  const CorrelationMatrix xi = load_xi(xi_path, lambda);
  ComplexMatrix rho = load_state(state_path, xi.dim()).mat();
  Output o;
  o.config = "deco run lambda=" + fmt(lambda) + " steps=" + std::to_string(steps) +
             (state_path.empty() ? "" : " state=" + state_path) + (xi_path.empty() ? "" : " xi=" + xi_path);
  o.columns = {"step", "k", "l", "abs"};
  for (std::size_t s = 0; s <= steps; ++s) {
    for (std::size_t k = 0; k < xi.dim(); ++k)
      for (std::size_t l = k + 1; l < xi.dim(); ++l) o.rows.push_back({s, k, l, std::abs(rho(idx(k), idx(l)))});
    rho = schur_apply(xi, rho);
  }
  return o;
}

inline Output cmd_deco_invert(double lambda, const std::string& state_path, const std::string& xi_path, std::uint64_t seed) {
  const CorrelationMatrix xi = load_xi(xi_path, lambda);
  DensityMatrix rho = state_path.empty()
                          ? [&] {
                              Rng rng(seed);
                              return DensityMatrix(rng.density(xi.dim(), xi.dim()));
                            }()
                          : load_state(state_path, xi.dim());
  const auto dec = random_unitary_decomp(xi);
  const auto rep = invert_by_feedback(dec, rho.mat());
  const ComplexMatrix mixed = ComplexMatrix::Identity(idx(xi.dim()), idx(xi.dim())) / double(xi.dim());
  ordered_json r;
  r["dim"] = xi.dim();
  r["branches"] = dec.weights.size();
  r["weights"] = dec.weights;
  r["bits_used"] = rep.bits_used;
  r["entropy_exchange_mixed"] = entropy_exchange(xi, mixed);
  r["decohered_distance"] = trace_distance(rep.decohered, rho.mat());
  r["recovery_distance"] = trace_distance(rep.recovered, rho.mat());
  Output o;
  o.config = "deco invert lambda=" + fmt(lambda) + " seed=" + std::to_string(seed) +
             (state_path.empty() ? "" : " state=" + state_path) + (xi_path.empty() ? "" : " xi=" + xi_path);
  o.record = std::move(r);
  return o;
}

inline Output cmd_deco_info(double lambda) {
  const auto xi = phase_kick(lambda);
  const RealVector ev = eigvalsh(xi.xi() / 2.0);
  ordered_json r;
  r["lambda"] = lambda;
  r["info_bits"] = phase_kick_info(lambda);
  r["gaussian_bits"] = lambda > 0 ? gaussian_kick_entropy(lambda) : -std::numeric_limits<double>::infinity();
  r["xi_half_eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
  Output o;
  o.config = "deco info lambda=" + fmt(lambda);
  o.record = std::move(r);
  return o;
}

// --------------------------------------------------------------- demo

inline Output cmd_demo_repeatable(std::size_t dim, double p, std::size_t reps, std::uint64_t seed) {
  const auto t = truncated_repeatable(dim, p);
  StateVector psi = StateVector::Zero(idx(dim));
  psi(0) = 1.0;
  if (2 * reps + 1 > t.safe_dim()) {
    throw DomainError("demo repeatable: " + std::to_string(reps) + " repetitions leave the safe subspace of D = " +
                      std::to_string(dim) + "; need D >= " + std::to_string(2 * reps + 4));
  }
  Rng rng(seed);
  const auto trace = simulate_repetitions(t, psi, reps, rng);
  Output o;
  o.config = "demo repeatable D=" + std::to_string(dim) + " p=" + fmt(p) + " reps=" + std::to_string(reps) +
             " seed=" + std::to_string(seed);
  o.columns = {"rep", "outcome", "p0", "p1", "p_repeat", "mean_level"};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace[i];
    ordered_json repeat = nullptr;
    if (i > 0) repeat = s.prob[trace[i - 1].outcome];
    o.rows.push_back({i + 1, s.outcome, s.prob[0], s.prob[1], repeat, s.mean_level});
  }
  return o;
}

// ---------------------------------------------------------------- driver

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qdev: optimal quantum devices, broadcasting, POVM order and decoherence"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path, format = "csv";
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "seed for randomized diagnostics");

  std::function<Output()> action;

  DeviceArgs dev;
  auto* devices = app.add_subcommand("devices", "fidelity tables and device construction");
  devices->require_subcommand(1);
  for (auto* sub : {devices->add_subcommand("fidelity", "fidelity table over d, N, M ranges"),
                    devices->add_subcommand("build", "Choi operator and channel check of one device")}) {
    sub->add_option("--device", dev.device, "universal-clone, phase-clone, unot, phase-not, superbroadcast");
    sub->add_option("--d", dev.d, "dimension or range");
    sub->add_option("--N", dev.n, "input copies or range");
    sub->add_option("--M", dev.m, "output copies or range");
    const bool build = sub->get_name() == "build";
    sub->callback([&, build] { action = [&, build] { return build ? cmd_device_build(dev) : cmd_fidelity_table(dev); }; });
  }

  std::string flavor = "universal", mspec = "+1", nspec = "4";
  std::size_t n = 4, grid = 100;
  auto* sc = app.add_subcommand("scaling", "scaling factor p(r) on a uniform grid in (0, 1]");
  sc->add_option("--flavor", flavor, "universal or phase");
  sc->add_option("--N", n, "input copies");
  sc->add_option("--M", mspec, "receivers: integer, inf, or +k for N+k");
  sc->add_option("--grid", grid, "number of grid points");
  sc->callback([&] { action = [&] { return cmd_scaling_curve(flavor, n, mspec, grid); }; });

  auto* rs = app.add_subcommand("rstar", "superbroadcasting threshold r*");
  rs->add_option("--flavor", flavor, "universal or phase");
  rs->add_option("--N", nspec, "input copies: integer or range");
  rs->add_option("--M", mspec, "receivers: list of integers, ranges, inf, +k");
  rs->callback([&] { action = [&] { return cmd_rstar(flavor, nspec, mspec); }; });

  std::vector<std::string> files;
  auto* povm = app.add_subcommand("povm", "POVM diagnostics and postprocessing order");
  povm->require_subcommand(1);
  auto* pc = povm->add_subcommand("check", "validate a POVM file");
  pc->add_option("file", files, "POVM JSON")->required()->expected(1);
  pc->callback([&] { action = [&] { return cmd_povm_check(files.at(0)); }; });
  auto* pr = povm->add_subcommand("reach", "is Q a postprocessing of P");
  pr->add_option("files", files, "P.json Q.json")->required()->expected(2);
  pr->callback([&] { action = [&] { return cmd_povm_reach(files.at(0), files.at(1)); }; });

  double lambda = 1.0;
  std::size_t steps = 5;
  std::string state_path, xi_path;
  auto* deco = app.add_subcommand("deco", "Schur-product decoherence");
  deco->require_subcommand(1);
  auto* dr = deco->add_subcommand("run", "iterate the map, print off-diagonal magnitudes");
  auto* di = deco->add_subcommand("invert", "random-unitary decomposition and feedback recovery");
  for (auto* sub : {dr, di}) {
    sub->add_option("--lambda", lambda, "phase-kick strength (used when --xi is absent)");
    sub->add_option("--state", state_path, "state JSON (default: uniform superposition or a seeded random state)");
    sub->add_option("--xi", xi_path, "correlation matrix JSON");
  }
  dr->add_option("--steps", steps, "number of applications");
  dr->callback([&] { action = [&] { return cmd_deco_run(lambda, steps, state_path, xi_path); }; });
  di->callback([&] { action = [&] { return cmd_deco_invert(lambda, state_path, xi_path, seed); }; });
  auto* dinfo = deco->add_subcommand("info", "information needed to undo a phase kick");
  dinfo->add_option("--lambda", lambda, "phase-kick strength")->required();
  dinfo->callback([&] { action = [&] { return cmd_deco_info(lambda); }; });

  std::size_t dim = 12, reps = 4;
  double prob = 0.3;
  auto* demo = app.add_subcommand("demo", "demonstrators");
  demo->require_subcommand(1);
  auto* rep = demo->add_subcommand("repeatable", "truncated nonorthogonal repeatable instrument");
  rep->add_option("--D", dim, "truncation dimension (even, >= 6)");
  rep->add_option("--p", prob, "weight of level 0 in the first effect");
  rep->add_option("--reps", reps, "number of repetitions");
  rep->callback([&] { action = [&] { return cmd_demo_repeatable(dim, prob, reps, seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kDomain;
  }
  try {
    const Output o = action();
    if (out_path.empty()) {
      write_output(o, format, out);
    } else {
      std::ofstream f(out_path);
      if (!f) throw DomainError("cannot write " + out_path);
      write_output(o, format, f);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}

}  // namespace qdev::cli
