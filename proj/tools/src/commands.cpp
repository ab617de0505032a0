// Copyright 2026 The walkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "walkbench/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "walkbench/errors.hpp"
#include "walkbench/fock.hpp"
#include "walkbench/radial.hpp"
#include "walkbench/ratio_limit.hpp"
#include "walkbench/serialization.hpp"

namespace walkbench::cli {
namespace {

EngineChoice parse_engine(const std::string& name) {
  if (name == "generic") return EngineChoice::kGeneric;
  if (name == "lattice") return EngineChoice::kLattice;
  if (name == "radial") return EngineChoice::kRadial;
  return EngineChoice::kAuto;
}

/// Caches shared by every session of this process, keyed by content hash.
std::map<std::string, std::shared_ptr<const PowersCache>>& process_caches() {
  static std::map<std::string, std::shared_ptr<const PowersCache>> m;
  return m;
}
std::mutex& process_mutex() {
  static std::mutex mu;
  return mu;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json reports_json(const std::vector<DiagnosticsReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(r.to_json());
  return a;
}

Normalizer bound_normalizer(Session& s) {
  auto cache = s.cache();
  const double rho = s.spectrum().rho_hat;
  return [cache, rho](const GroupElement& x) { return bound_constants(*cache, rho, x).C; };
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return err->kind() == ErrorKind::kBudget ? kExitBudget : kExitPrecondition;
  }
  return kExitPrecondition;
}

// ---------------------------------------------------------------------------
// Session

Session::Session(RunConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

std::shared_ptr<const Group> Session::group() {
  if (!group_) group_ = std::make_shared<const Group>(GroupDescriptor::parse(cfg_.descriptor));
  return group_;
}

const ScaledMeasure& Session::measure() {
  if (!measure_) {
    measure_ = load_measure(*group(), resolve(cfg_, cfg_.measure_file));
    validate_measure(*group(), *measure_);
  }
  return *measure_;
}

std::shared_ptr<const PowersCache> Session::cache() {
  if (cache_) return cache_;
  const auto engine = parse_engine(cfg_.engine);
  const std::string key = content_hash(*group(), measure(), cfg_.depth, engine);
  {
    std::lock_guard<std::mutex> lock(process_mutex());
    auto it = process_caches().find(key);
    if (it != process_caches().end()) return cache_ = it->second;
  }
  std::filesystem::path disk;
  if (!cfg_.cache_dir.empty()) {
    disk = std::filesystem::path(cfg_.cache_dir) / ("powers-" + key + ".json");
    if (std::filesystem::exists(disk)) cache_ = load_powers(disk.string(), group()->options());
  }
  if (!cache_) {
    const auto t0 = std::chrono::steady_clock::now();
    cache_ = build_powers(group(), measure(), cfg_.depth, engine);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg_.time_budget > 0.0 && secs > cfg_.time_budget) {
      throw BudgetExceeded("powers cache took " + std::to_string(secs) +
                           " s, above the time budget");
    }
    if (!disk.empty()) save_powers(*cache_, disk.string());
  }
  if (cache_->truncated()) {
    throw BudgetExceeded("powers cache stopped at depth " + std::to_string(cache_->depth()) +
                         ": " + cache_->truncation_reason());
  }
  std::lock_guard<std::mutex> lock(process_mutex());
  process_caches().emplace(key, cache_);
  return cache_;
}

AccelerationOptions Session::acceleration() const {
  AccelerationOptions o;
  o.method = parse_accelerator(cfg_.accelerator);
  return o;
}

const SpectralEstimate& Session::spectrum() {
  if (!spectrum_) spectrum_ = spectral_radius(*cache(), acceleration());
  return *spectrum_;
}

const std::optional<LocalLimitFit>& Session::fit() {
  if (!fit_) {
    try {
      fit_ = std::optional<LocalLimitFit>(fit_local_limit_exponent(*cache(), spectrum().rho_hat));
    } catch (const PreconditionError&) {
      fit_ = std::optional<LocalLimitFit>();
    }
  }
  return *fit_;
}

std::shared_ptr<const KernelSource> Session::ratio_kernel() {
  if (!kernel_) kernel_ = std::make_shared<RatioKernel>(cache(), acceleration());
  return kernel_;
}

Json Session::provenance() {
  const auto a = acceleration();
  return {{"descriptor", group()->descriptor().to_string()},
          {"engine", engine_name(cache()->kind())},
          {"M", cache()->depth()},
          {"rhoHat", spectrum().rho_hat},
          {"acceleration",
           {{"method", accelerator_name(a.method)},
            {"order", a.order},
            {"spacing_divisor", a.spacing_divisor},
            {"window", a.window}}}};
}

std::filesystem::path Session::out_dir() const { return std::filesystem::path(cfg_.output); }

void Session::write(const std::string& name, const std::string& text) {
  const auto path = out_dir() / name;
  write_file_atomic(path.string(), text);
  written_.push_back(path.string());
}

GroupElement Session::element(const std::string& text) { return group()->parse(text); }

std::vector<GroupElement> Session::elements(const std::vector<std::string>& texts) {
  std::vector<GroupElement> out;
  for (const auto& t : texts) out.push_back(element(t));
  return out;
}

// ---------------------------------------------------------------------------
// Commands

std::vector<DiagnosticsReport> cmd_spectrum(Session& s) {
  const auto& cache = *s.cache();
  const auto& sp = s.spectrum();
  const auto& fit = s.fit();
  Json j = {{"rhoHat", sp.rho_hat},
            {"spread", sp.spread},
            {"mRange", {sp.m_lo, sp.m_hi}},
            {"method", sp.method},
            {"period", sp.period},
            {"interval", {sp.tail.lo, sp.tail.hi}}};
  if (fit) {
    j["alpha"] = fit->alpha;
    j["alphaRms"] = fit->rms;
    j["alphaRange"] = {fit->m_lo, fit->m_hi};
  } else {
    j["alpha"] = nullptr;
  }
  j["provenance"] = s.provenance();
  s.write("spectrum.json", j.dump(2) + "\n");

  const auto e = cache.group().identity();
  const int p = sp.period;
  std::ostringstream csv;
  csv << "m,ratio,log_ratio\n";
  for (int m = p; m + p <= cache.depth(); m += p) {
    if (!cache.present(m, e) || !cache.present(m + p, e)) continue;
    const double lr = (cache.log_value(m + p, e) - cache.log_value(m, e)) / p;
    csv << m << ',' << format_double(std::exp(lr)) << ',' << format_double(lr) << '\n';
  }
  s.write("ratio_tail.csv", csv.str());

  DiagnosticsReport rep;
  rep.name = "spectrum";
  rep.inputs = {{"depth", s.config().depth}};
  rep.tolerances = {{"spread", s.config().tolerance}};
  rep.provenance = s.provenance();
  rep.details = j;
  rep.add("estimate spread", sp.spread, s.config().tolerance);
  rep.conclude();
  return {rep};
}

std::vector<DiagnosticsReport> cmd_kernel(Session& s) {
  const auto& cfg = s.config();
  const auto& G = *s.group();
  const auto H = s.ratio_kernel();
  const auto ball = G.ball(cfg.kernel_radius);
  auto table = KernelTable::tabulate(*H, ball, ball);
  table.rho_hat = s.spectrum().rho_hat;
  table.provenance = s.provenance();
  s.write("kernel.csv", table.to_csv());
  s.write("kernel.json", table.to_json().dump(2) + "\n");

  DiagnosticsReport rep;
  rep.name = "kernel";
  rep.inputs = {{"radius", cfg.kernel_radius}, {"pairs", table.size()}};
  rep.provenance = s.provenance();
  int bad = 0;
  for (const auto& [k, e] : table.entries()) {
    if (!std::isfinite(e.estimate) || !(e.lo <= e.estimate && e.estimate <= e.hi)) ++bad;
  }
  rep.add_flag("entries outside their interval", bad, 0, bad == 0);

  if (cfg.closed_form_compare) {
    if (G.descriptor().family() != Family::kFree) {
      throw PreconditionError("closed-form comparison needs a free group");
    }
    radial_reduce(G, s.measure());  // throws unless isotropic
    for (const auto& [g, v] : s.measure().support) {
      if (G.word_length(g) > 1) {
        throw PreconditionError("closed-form comparison needs a nearest-neighbour measure");
      }
    }
    std::ostringstream csv;
    csv << "x,y,estimate,lower,upper,method,closed_form,rel_error\n";
    double worst = 0.0;
    for (const auto& [k, e] : table.entries()) {
      const double cf = closed_form_H_free_isotropic(G, k.first, k.second);
      const double rel = std::abs(e.estimate - cf) / cf;
      worst = std::max(worst, rel);
      csv << csv_escape(G.format(k.first)) << ',' << csv_escape(G.format(k.second)) << ','
          << format_double(e.estimate) << ',' << format_double(e.lo) << ','
          << format_double(e.hi) << ',' << e.method << ',' << format_double(cf) << ','
          << format_double(rel) << '\n';
    }
    s.write("kernel_compare.csv", csv.str());
    rep.tolerances = {{"relative", cfg.tolerance}};
    rep.add("max relative error vs closed form", worst, cfg.tolerance);
  }
  rep.conclude();
  return {rep};
}

std::vector<DiagnosticsReport> cmd_radical(Session& s) {
  const auto& cfg = s.config();
  const auto& G = *s.group();
  const auto H = s.ratio_kernel();
  const double tol = cfg.radical_tolerance ? *cfg.radical_tolerance : -1.0;
  const auto r = detect_radical(*H, cfg.radical_radius, cfg.radical_probe, tol);
  const auto ball = G.ball(cfg.radical_radius);

  std::string statement;
  if (r.flagged.size() == ball.size()) {
    statement = "flagged = entire tested ball";
  } else if (r.flagged.size() == 1 && G.is_identity(r.flagged.front())) {
    statement = "flagged = {e}";
  } else {
    statement = "flagged = " + std::to_string(r.flagged.size()) + " of " +
                std::to_string(ball.size());
  }
  Json j = r.to_json(G);
  j["statement"] = statement;
  j["provenance"] = s.provenance();
  s.write("radical.json", j.dump(2) + "\n");

  DiagnosticsReport rep;
  rep.name = "radical";
  rep.inputs = {{"radius", cfg.radical_radius}, {"probe", cfg.radical_probe}};
  rep.tolerances = {{"flag", cfg.radical_tolerance ? Json(*cfg.radical_tolerance) : Json("auto")}};
  rep.provenance = s.provenance();
  rep.details = {{"statement", statement}, {"flagged", r.flagged.size()}};
  rep.add_flag("closure of the flagged set", r.closure_ok ? 0.0 : 1.0, 0.0, r.closure_ok);
  rep.conclude();
  rep.verdict = statement;
  return {rep};
}

std::vector<DiagnosticsReport> cmd_metric(Session& s) {
  const auto& cfg = s.config();
  const auto& G = *s.group();
  const auto H = s.ratio_kernel();
  const auto prefix = G.ball(cfg.metric_prefix_radius);
  const auto C = bound_normalizer(s);

  std::vector<std::pair<GroupElement, GroupElement>> pairs;
  for (const auto& [y, z] : cfg.metric_pairs) pairs.emplace_back(s.element(y), s.element(z));
  if (pairs.empty()) {
    const auto b = G.ball(1);
    for (std::size_t i = 1; i < b.size(); ++i) pairs.emplace_back(G.identity(), b[i]);
  }

  std::ostringstream csv;
  csv << "y,z,distance,tail_bound,uncertainty\n";
  for (const auto& [y, z] : pairs) {
    const auto d = ratio_metric(*H, prefix, y, z, C);
    csv << csv_escape(G.format(y)) << ',' << csv_escape(G.format(z)) << ','
        << format_double(d.value) << ',' << format_double(d.tail_bound) << ','
        << format_double(d.uncertainty) << '\n';
  }
  s.write("metric.csv", csv.str());

  // Pseudometric axioms on the points named by the pairs.
  std::vector<GroupElement> pts;
  for (const auto& [y, z] : pairs) {
    for (const auto& g : {y, z}) {
      if (std::find(pts.begin(), pts.end(), g) == pts.end()) pts.push_back(g);
    }
  }
  const std::size_t n = pts.size();
  std::vector<double> d(n * n);
  double self = 0.0, asym = 0.0, triangle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = ratio_metric(*H, prefix, pts[i], pts[j], C).value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    self = std::max(self, std::abs(d[i * n + i]));
    for (std::size_t j = 0; j < n; ++j) {
      asym = std::max(asym, std::abs(d[i * n + j] - d[j * n + i]));
      for (std::size_t k = 0; k < n; ++k) {
        triangle = std::max(triangle, d[i * n + k] - d[i * n + j] - d[j * n + k]);
      }
    }
  }
  DiagnosticsReport rep;
  rep.name = "metric";
  rep.inputs = {{"prefix_radius", cfg.metric_prefix_radius}, {"points", n}};
  rep.tolerances = {{"axioms", 1e-12}};
  rep.provenance = s.provenance();
  rep.add("d(y,y)", self, 1e-12);
  rep.add("|d(y,z) - d(z,y)|", asym, 1e-12);
  rep.add("triangle excess", std::max(0.0, triangle), 1e-12);
  rep.conclude();
  return {rep};
}

std::vector<DiagnosticsReport> cmd_boundary(Session& s) {
  const auto& cfg = s.config();
  const auto& G = *s.group();
  const auto H = s.ratio_kernel();

  std::vector<GroupElement> seq = s.elements(cfg.boundary_sequence);
  if (seq.empty()) {
    if (cfg.boundary_ray.empty()) {
      throw PreconditionError("[boundary] needs a sequence or a ray");
    }
    const auto g = s.element(cfg.boundary_ray);
    auto y = G.identity();
    for (int k = 0; k <= cfg.boundary_to; ++k) {
      if (k >= cfg.boundary_from) seq.push_back(y);
      y = G.multiply(y, g);
    }
  }
  if (seq.size() < 2) throw PreconditionError("boundary sequence needs two or more terms");
  std::vector<GroupElement> xs = s.elements(cfg.boundary_xs);
  if (xs.empty()) xs = G.ball(1);

  TraceOptions opts;
  opts.metric_radius = cfg.metric_prefix_radius;
  opts.tol = cfg.tolerance;
  auto rep = boundary_trace(*H, xs, seq, bound_normalizer(s), opts);
  rep.provenance = s.provenance();

  std::ostringstream csv;
  csv << "k,y,x,estimate,lower,upper\n";
  for (std::size_t k = 0; k < seq.size(); ++k) {
    for (const auto& x : xs) {
      const auto e = H->entry(x, seq[k]);
      csv << k << ',' << csv_escape(G.format(seq[k])) << ',' << csv_escape(G.format(x)) << ','
          << format_double(e.estimate) << ',' << format_double(e.lo) << ','
          << format_double(e.hi) << '\n';
    }
  }
  s.write("boundary.csv", csv.str());
  return {rep};
}

namespace {

FockWindow make_window(Session& s, int x_radius = 0, int z_radius = 0) {
  const auto& c = s.config();
  if (c.fock_depth > c.depth) throw PreconditionError("fock.depth exceeds run.depth");
  return FockWindow(s.cache(), c.fock_depth, x_radius > 0 ? x_radius : c.fock_x_radius,
                    z_radius > 0 ? z_radius : c.fock_z_radius, c.fock_margin);
}

GroupElement default_generator(Session& s, const std::string& text) {
  if (!text.empty()) return s.element(text);
  return s.group()->generators().front();
}

}  // namespace

std::vector<DiagnosticsReport> cmd_fock(Session& s) {
  const auto& cfg = s.config();
  const auto& G = *s.group();
  const auto H = s.ratio_kernel();
  const auto w = make_window(s);
  const auto x = s.element(cfg.fock_x);
  const auto y = default_generator(s, cfg.fock_y);
  auto elems = s.elements(cfg.fock_elements);
  if (elems.empty()) elems = G.ball(1);
  DefectOptions opts;
  opts.seed = cfg.seed;

  Json window = w.to_json();
  std::vector<DiagnosticsReport> out;
  out.push_back(matrix_unit_defects(w, elems, opts));
  out.push_back(unitary_and_commutation_defects(w, *H, elems, opts));
  out.push_back(generator_identity_defect(w, *H, cfg.fock_n, x, y, opts));
  out.push_back(tw_defect_decay(w, *H, s.spectrum().rho_hat, cfg.fock_n, x, y));
  out.push_back(q0_projection_check(w, x, opts));
  const int m = std::max(1, std::min(cfg.fock_depth, 6) - cfg.fock_n);
  out.push_back(subproduct_coisometry_check(*s.cache(), cfg.fock_n, m, cfg.fock_x_radius,
                                            cfg.fock_z_radius));
  for (auto& r : out) {
    r.provenance = s.provenance();
    r.provenance["window"] = window;
  }

  Json ops = Json::array();
  ops.push_back(dump_operator(build_S(w, cfg.fock_n, x, y)));
  ops.push_back(dump_operator(build_T(w, cfg.fock_n, x, y, s.spectrum().rho_hat)));
  ops.push_back(dump_operator(build_W(w, cfg.fock_n, x, y, *H)));
  s.write("fock_window.json", dump_window(w).dump() + "\n");
  s.write("fock_operators.json", ops.dump() + "\n");
  return out;
}

std::vector<DiagnosticsReport> cmd_covariance(Session& s) {
  const auto& cfg = s.config();
  const auto w = make_window(s, cfg.covariance_x_radius, cfg.covariance_z_radius);
  const auto g = default_generator(s, cfg.covariance_g);
  const auto x = s.element(cfg.covariance_x);
  const auto y = default_generator(s, cfg.covariance_y);
  auto rep = covariance_check(w, g, std::polar(1.0, cfg.covariance_zeta_angle), cfg.covariance_n,
                              x, y);
  rep.provenance = s.provenance();
  rep.provenance["window"] = w.to_json();
  return {rep};
}

std::vector<DiagnosticsReport> cmd_report(Session& s) {
  std::vector<std::string> jobs = s.config().jobs;
  if (jobs.empty()) {
    for (const auto& n : command_names()) {
      if (n != "report") jobs.push_back(n);
    }
  }
  std::vector<DiagnosticsReport> all;
  Json summary = Json::array();
  for (const auto& job : jobs) {
    if (job == "report") continue;
    auto fn = find_command(job);
    if (!fn) throw InvalidArgument("unknown job '" + job + "'");
    try {
      auto reps = fn(s);
      bool ok = true;
      for (const auto& r : reps) ok = ok && r.passed();
      s.write("reports/" + job + ".json", reports_json(reps).dump(2) + "\n");
      Json names = Json::array();
      for (const auto& r : reps) names.push_back({{"name", r.name}, {"verdict", r.verdict},
                                                  {"pass", r.passed()}});
      summary.push_back({{"job", job}, {"status", ok ? "pass" : "fail"}, {"reports", names}});
      for (auto& r : reps) all.push_back(std::move(r));
    } catch (const std::exception& e) {
      DiagnosticsReport r;
      r.name = job;
      r.add_flag("job completed", 1.0, 0.0, false);
      r.verdict = "error";
      r.details = {{"error", e.what()}, {"exit_code", exit_code_for(e)}};
      summary.push_back({{"job", job}, {"status", "error"}, {"error", e.what()},
                         {"exit_code", exit_code_for(e)}});
      all.push_back(std::move(r));
    }
  }
  bool green = true;
  for (const auto& r : all) green = green && r.passed();
  Json j = {{"config", s.config().descriptor}, {"jobs", summary}, {"pass", green}};
  s.write("summary.json", j.dump(2) + "\n");
  return all;
}

// ---------------------------------------------------------------------------
// Dispatch

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "kernel", "radical", "metric",
                                              "boundary", "fock",   "covariance", "report"};
  return names;
}

CommandFn find_command(const std::string& name) {
  static const std::map<std::string, CommandFn> table{
      {"spectrum", &cmd_spectrum}, {"kernel", &cmd_kernel},     {"radical", &cmd_radical},
      {"metric", &cmd_metric},     {"boundary", &cmd_boundary}, {"fock", &cmd_fock},
      {"covariance", &cmd_covariance}, {"report", &cmd_report}};
  auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

int run_command(const std::string& name, Session& s) {
  auto fn = find_command(name);
  if (!fn) throw InvalidArgument("unknown command '" + name + "'");
  const auto reps = fn(s);
  if (name != "report") s.write("reports/" + name + ".json", reports_json(reps).dump(2) + "\n");
  bool green = true;
  for (const auto& r : reps) {
    green = green && r.passed();
    std::cout << name << ": " << r.name << " " << (r.passed() ? "pass" : "FAIL");
    if (!r.verdict.empty() && r.verdict != "pass" && r.verdict != "fail") {
      std::cout << " (" << r.verdict << ")";
    }
    std::cout << '\n';
  }
  return green ? kExitOk : kExitAcceptance;
}

}  // namespace walkbench::cli
