#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "besovkit/atoms.hpp"
#include "besovkit/besov.hpp"
#include "besovkit/experiments.hpp"
#include "besovkit/geometry.hpp"
#include "besovkit/multipliers.hpp"
#include "besovkit/trace.hpp"
#include "besovkit/whitney.hpp"

using namespace besovkit;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LipschitzDomain named_domain(const std::string& name) {
  if (name == "square") return LipschitzDomain::unit_square();
  if (name == "lshape") return LipschitzDomain::l_shape();
  if (name == "sawtooth") return LipschitzDomain::sawtooth();
  return load_domain(name);
}

// "-" is stdout
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

double parse_real(const std::string& text) {
  if (text == "inf" || text == "infinity") return INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw UsageError("expected a number, got '" + text + "'");
  return v;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// real-valued option that also accepts "inf"
CLI::Option* add_real(CLI::App* app, const std::string& name, std::string& target, const std::string& help) {
  return app->add_option(name, target, help)->capture_default_str();
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string name;
  std::string config;
  std::string out;
  std::string plot;
  std::string plot_x;
  std::string plot_y;
  std::vector<std::string> overrides;
  long long seed = -1;
  bool parallel = false;
  unsigned threads = 0;
};

void write_plot(const ExperimentResult& r, const RunArgs& a) {
  auto column = [&](const std::string& n) {
    const auto it = std::find(r.columns.begin(), r.columns.end(), n);
    if (it == r.columns.end()) throw UsageError("no column '" + n + "' in " + r.name);
    return static_cast<std::size_t>(it - r.columns.begin());
  };
  const std::size_t x = column(a.plot_x.empty() ? r.columns.front() : a.plot_x);
  const std::size_t y = column(a.plot_y.empty() ? r.columns.back() : a.plot_y);
  Sink sink(a.plot);
  auto& out = sink.stream();
  out << "# " << r.columns[x] << ' ' << r.columns[y] << '\n';
  for (const auto& row : r.rows) out << row[x] << ' ' << row[y] << '\n';
}

int cmd_run(const RunArgs& a, const std::string& usage) {
  if (!is_experiment(a.name)) {
    std::cerr << "unknown experiment '" << a.name << "'\n\n" << usage << "\nexperiments:";
    for (const auto& n : experiment_names()) std::cerr << ' ' << n;
    std::cerr << '\n';
    return kUsage;
  }
  Config cfg = a.config.empty() ? Config{} : Config::load(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed >= 0) cfg.set("seed", std::to_string(a.seed));
  RunOptions opt;
  opt.parallel = a.parallel;
  opt.threads = a.threads ? std::min(a.threads, RunOptions::default_threads()) : RunOptions::default_threads();

  const auto result = run_experiment(a.name, cfg, opt);
  {
    Sink sink(a.out.empty() ? a.name + ".csv" : a.out);
    result.write_csv(sink.stream());
  }
  if (!a.plot.empty()) write_plot(result, a);
  std::cout << result.summary() << '\n';
  for (const auto& c : result.checks) {
    if (!c.pass) std::cerr << "  " << c.name << ": " << c.detail << '\n';
  }
  return result.pass() ? kPass : kFail;
}

// ---------------------------------------------------------------------------

struct WhitneyArgs {
  std::string domain = "square";
  int jmax = 6;
  double gamma = 8.0;
  std::string out = "-";
};

int cmd_whitney(const WhitneyArgs& a) {
  const auto cover = whitney_decompose(named_domain(a.domain), a.jmax, a.gamma);
  Sink sink(a.out);
  write_cover(sink.stream(), cover);
  return kPass;
}

struct AtomsArgs {
  std::string input;
  std::string out = "-";
  std::string kind = "k-smooth";
  std::string shape;
  int J = 4;
  int K = 2;
  std::string sigma = "0.6";
  std::string s = "0.5";
  std::string p = "2";
  std::string q = "2";
  int r = 1;
  int jstar = -1;
  double band = 16.0;
  bool lenient = false;
};

BesovParams target_params(const AtomsArgs& a) {
  BesovParams b;
  b.s = parse_real(a.s);
  b.p = parse_real(a.p);
  b.q = parse_real(a.q);
  b.r = a.r;
  return b;
}

int cmd_decompose(const AtomsArgs& a) {
  auto in = open_input(a.input);
  const auto f = read_grid(in);
  AtomParams ap;
  ap.K = a.K;
  ap.sigma = parse_real(a.sigma);
  ap.p = parse_real(a.p);
  std::optional<AtomShape> shape;
  if (!a.shape.empty()) shape = parse_atom_shape(a.shape);
  const auto dec = decompose(f, target_params(a), a.J, parse_atom_kind(a.kind), ap, shape, 2.0, !a.lenient);
  Sink sink(a.out);
  write_decomposition(sink.stream(), dec);
  return kPass;
}

int cmd_reconstruct(const AtomsArgs& a) {
  auto in = open_input(a.input);
  const auto dec = read_decomposition(in);
  const int top = a.jstar >= 0 ? a.jstar : std::max(0, dec.coefficients.max_level());
  Sink sink(a.out);
  write_grid(sink.stream(), reconstruct(dec, top));
  return kPass;
}

int cmd_reexpand(const AtomsArgs& a) {
  auto in = open_input(a.input);
  const auto dec = read_decomposition(in);
  const auto res = reexpand(dec, a.K, parse_real(a.s), a.band);
  Sink sink(a.out);
  write_decomposition(sink.stream(), res.output);
  std::cerr << "epsilon=" << fmt(res.epsilon) << " max_overlap=" << res.max_overlap << " (bound "
            << res.overlap_bound << ") max_inner_norm=" << fmt(res.max_inner_norm)
            << " agreement=" << fmt(res.agreement) << '\n';
  return kPass;
}

struct TraceArgs {
  std::string input;
  std::string domain = "square";
  std::string s = "0.5";
  std::string p = "2";
  std::string q = "2";
  int grid = 7;
  int cover = 6;
  double gamma = 8.0;
  int J = 2;
  unsigned long long seed = 1;
  double decay = 0.0;
  std::string out = "-";
};

int cmd_trace_roundtrip(const TraceArgs& a) {
  const auto dom = named_domain(a.domain);
  auto in = open_input(a.input);
  BoundaryDecomposition g(dom);
  g.atoms = read_decomposition(in);
  if (g.atoms.coefficients.carrier() != Carrier::boundary || g.atoms.kind != AtomKind::lip_gamma) {
    throw UsageError("'" + a.input + "' is not a boundary decomposition (kind=lip-gamma, carrier:boundary)");
  }
  BesovParams prm{parse_real(a.s), parse_real(a.p), parse_real(a.q), 1, 8};
  const auto ctx = ExtensionContext::build(dom, a.cover, a.gamma);
  const auto r = roundtrip_report(g, ctx, prm, a.grid);
  Sink sink(a.out);
  auto& out = sink.stream();
  out << "s,p,q,grid_level,cover_j_max,gamma,nodes,node_error,interpolation_tolerance,direct_error,"
         "extension_norm,boundary_seq_norm,trace_seq_norm,ratio_ext,ratio_tr,trace_ok\n";
  out << fmt(prm.s) << ',' << fmt(prm.p) << ',' << fmt(prm.q) << ',' << a.grid << ',' << a.cover << ','
      << fmt(a.gamma) << ',' << r.nodes << ',' << fmt(r.node_error) << ',' << fmt(r.interpolation_tolerance)
      << ',' << fmt(r.direct_error) << ',' << fmt(r.extension_norm) << ',' << fmt(r.boundary_seq_norm) << ','
      << fmt(r.trace_seq_norm) << ',' << fmt(r.ratio_ext) << ',' << fmt(r.ratio_tr) << ','
      << (r.trace_ok() ? 1 : 0) << '\n';
  return r.trace_ok() ? kPass : kFail;
}

int cmd_trace_random(const TraceArgs& a) {
  const auto g = random_boundary_decomposition(named_domain(a.domain), a.J, a.seed, a.decay);
  Sink sink(a.out);
  write_decomposition(sink.stream(), g.atoms);
  return kPass;
}

struct MultArgs {
  std::string domain = "square";
  std::string input;
  std::string p = "2";
  std::string q = "1,2,inf";
  std::string sigma = "0.2,0.35,0.5,0.65,0.8";
  std::string s = "0.5";
  int level = 8;
  int r = 1;
  int n = 2;
  std::string d;
  int J = 3;
  int K = 256;
  int jmax = 8;
  int max_dilation = 3;
  int window_level = 5;
  std::string out = "-";
};

int cmd_chi(const MultArgs& a) {
  const auto prof = chi_profile(named_domain(a.domain), parse_real(a.p), parse_reals(a.sigma),
                                parse_reals(a.q), a.level, a.r);
  Sink sink(a.out);
  auto& out = sink.stream();
  out << "# domain=" << a.domain << " grid_level=" << a.level << " modulus_slope=" << fmt(prof.slope_fit.slope)
      << " r2=" << fmt(prof.slope_fit.r2) << '\n';
  write_chi_csv(out, prof);
  return kPass;
}

int cmd_hset(const MultArgs& a) {
  const double d = a.d.empty() ? a.n - 1.0 : parse_real(a.d);
  const double p = parse_real(a.p);
  const auto gauge = HGauge::power(d);
  Sink sink(a.out);
  auto& out = sink.stream();
  out << "sigma,p,q,n,d,J,K,partial_sum,closed_form,divergent\n";
  for (double q : parse_reals(a.q)) {
    for (double sg : parse_reals(a.sigma)) {
      const auto h = hset_condition_sum(gauge, sg, p, q, a.n, a.J, a.K);
      for (std::size_t i = 0; i < h.k_checkpoints.size(); ++i) {
        out << fmt(sg) << ',' << fmt(p) << ',' << fmt(q) << ',' << a.n << ',' << fmt(d) << ',' << a.J << ','
            << h.k_checkpoints[i] << ',' << fmt(h.partial_sums[i]) << ',' << fmt(h.closed_form) << ','
            << (h.divergent ? 1 : 0) << '\n';
      }
    }
  }
  return kPass;
}

int cmd_selfsimilar(const MultArgs& a) {
  auto in = open_input(a.input);
  const auto f = read_grid(in);
  BesovParams prm{parse_real(a.s), parse_real(a.p), parse_reals(a.q).front(), a.r, a.jmax};
  SelfsimilarConfig cfg;
  cfg.dim = f.dim();
  cfg.max_dilation = a.max_dilation;
  cfg.grid_level = a.window_level;
  const auto m = selfsimilar_membership(f, prm, cfg);
  Sink sink(a.out);
  auto& out = sink.stream();
  out << "s,p,q,r,j_max,max_dilation,window_level,value,argmax_j,argmax_l1,argmax_l2,linf,linf_ratio\n";
  out << fmt(prm.s) << ',' << fmt(prm.p) << ',' << fmt(prm.q) << ',' << prm.r << ',' << prm.j_max << ','
      << cfg.max_dilation << ',' << cfg.grid_level << ',' << fmt(m.selfsimilar.value) << ','
      << m.selfsimilar.argmax_j << ',' << fmt(m.selfsimilar.argmax_l.x) << ',' << fmt(m.selfsimilar.argmax_l.y)
      << ',' << fmt(m.linf) << ',' << fmt(m.linf_ratio) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"besovkit: Besov spaces on Lipschitz domains, experiments and tools"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run a named experiment suite, write its CSV and print PASS/FAIL");
  run_cmd->add_option("name", run.name, "experiment name")->required();
  run_cmd->add_option("--config,-c", run.config, "key=value config file with [sections]");
  run_cmd->add_option("--seed", run.seed, "overrides the config seed");
  run_cmd->add_option("--out,-o", run.out, "CSV path (default <name>.csv, - for stdout)");
  run_cmd->add_option("--set", run.overrides, "extra key=value (repeatable; section.key allowed)");
  run_cmd->add_flag("--parallel", run.parallel, "run independent cases on several threads");
  run_cmd->add_option("--threads", run.threads, "thread count (capped by BESOVKIT_THREADS)");
  run_cmd->add_option("--plot", run.plot, "also write gnuplot two-column data here");
  run_cmd->add_option("--plot-x", run.plot_x, "x column (default first)");
  run_cmd->add_option("--plot-y", run.plot_y, "y column (default last)");

  app.add_subcommand("list", "print the experiment names");

  WhitneyArgs wh;
  auto* wh_cmd = app.add_subcommand("whitney", "dump a truncated Whitney cover");
  wh_cmd->add_option("--domain", wh.domain, "square, lshape, sawtooth or a domain file")->capture_default_str();
  wh_cmd->add_option("--jmax", wh.jmax, "truncation level")->capture_default_str();
  wh_cmd->add_option("--gamma", wh.gamma, "boundary averaging dilation")->capture_default_str();
  wh_cmd->add_option("--out,-o", wh.out, "output path")->capture_default_str();

  AtomsArgs at;
  auto* atoms_cmd = app.add_subcommand("atoms", "atomic decompositions");
  atoms_cmd->require_subcommand(1);
  auto* dec_cmd = atoms_cmd->add_subcommand("decompose", "grid file -> decomposition file");
  dec_cmd->add_option("--grid", at.input, "grid file")->required();
  dec_cmd->add_option("--kind", at.kind, "k-smooth, lip or sigma-p")->capture_default_str();
  dec_cmd->add_option("--shape", at.shape, "bump or tent (default per kind)");
  dec_cmd->add_option("--J", at.J, "finest level, <= grid level - 2")->capture_default_str();
  dec_cmd->add_option("--K", at.K, "smoothness order of K-atoms")->capture_default_str();
  add_real(dec_cmd, "--sigma", at.sigma, "sigma of (sigma,p)-atoms");
  add_real(dec_cmd, "--s", at.s, "target smoothness");
  add_real(dec_cmd, "--p", at.p, "target p");
  add_real(dec_cmd, "--q", at.q, "target q");
  dec_cmd->add_flag("--lenient", at.lenient, "do not stop when the residual sup grows");
  dec_cmd->add_option("--out,-o", at.out, "output path")->capture_default_str();
  auto* rec_cmd = atoms_cmd->add_subcommand("reconstruct", "decomposition file -> grid file");
  rec_cmd->add_option("--atoms", at.input, "decomposition file")->required();
  rec_cmd->add_option("--jstar", at.jstar, "sum levels j <= jstar (default all)");
  rec_cmd->add_option("--out,-o", at.out, "output path")->capture_default_str();
  auto* rex_cmd = atoms_cmd->add_subcommand("reexpand", "(sigma,p)-atoms -> K-atoms");
  rex_cmd->add_option("--atoms", at.input, "decomposition file of (sigma,p)-atoms")->required();
  rex_cmd->add_option("--K", at.K, "smoothness order of the output atoms")->capture_default_str();
  add_real(rex_cmd, "--s", at.s, "sequence-space smoothness");
  rex_cmd->add_option("--band", at.band, "bound on inner expansion norms")->capture_default_str();
  rex_cmd->add_option("--out,-o", at.out, "output path")->capture_default_str();

  TraceArgs tr;
  auto* trace_cmd = app.add_subcommand("trace", "boundary decompositions, extension and trace");
  trace_cmd->require_subcommand(1);
  auto* rt_cmd = trace_cmd->add_subcommand("roundtrip", "extend a boundary decomposition and take its trace");
  rt_cmd->add_option("--boundary-dec", tr.input, "boundary decomposition file")->required();
  rt_cmd->add_option("--domain", tr.domain, "square, lshape, sawtooth or a domain file")->capture_default_str();
  add_real(rt_cmd, "--s", tr.s, "boundary smoothness");
  add_real(rt_cmd, "--p", tr.p, "p");
  add_real(rt_cmd, "--q", tr.q, "q");
  rt_cmd->add_option("--grid", tr.grid, "grid level of the reconstruction")->capture_default_str();
  rt_cmd->add_option("--cover", tr.cover, "Whitney cover j_max")->capture_default_str();
  rt_cmd->add_option("--gamma", tr.gamma, "boundary averaging dilation")->capture_default_str();
  rt_cmd->add_option("--out,-o", tr.out, "CSV path")->capture_default_str();
  auto* rb_cmd = trace_cmd->add_subcommand("random", "write a random boundary decomposition");
  rb_cmd->add_option("--domain", tr.domain, "square, lshape, sawtooth or a domain file")->capture_default_str();
  rb_cmd->add_option("--J", tr.J, "finest level")->capture_default_str();
  rb_cmd->add_option("--seed", tr.seed, "random seed")->capture_default_str();
  rb_cmd->add_option("--decay", tr.decay, "coefficients scale like 2^{-decay j}")->capture_default_str();
  rb_cmd->add_option("--out,-o", tr.out, "output path")->capture_default_str();

  MultArgs mu;
  auto* mult_cmd = app.add_subcommand("multipliers", "characteristic functions and h-set conditions");
  mult_cmd->require_subcommand(1);
  auto* chi_cmd = mult_cmd->add_subcommand("chi-profile", "truncated norms of chi_Omega against J_max");
  chi_cmd->add_option("--domain", mu.domain, "square, lshape, sawtooth or a domain file")->capture_default_str();
  add_real(chi_cmd, "--p", mu.p, "p");
  add_real(chi_cmd, "--sigma", mu.sigma, "comma list");
  add_real(chi_cmd, "--q", mu.q, "comma list, inf allowed");
  chi_cmd->add_option("--level", mu.level, "grid level")->capture_default_str();
  chi_cmd->add_option("--r", mu.r, "difference order")->capture_default_str();
  chi_cmd->add_option("--out,-o", mu.out, "CSV path")->capture_default_str();
  auto* hs_cmd = mult_cmd->add_subcommand("hset-sum", "partial sums of the h-set condition for h(t)=t^d");
  hs_cmd->add_option("--n", mu.n, "ambient dimension")->capture_default_str();
  hs_cmd->add_option("--d", mu.d, "gauge exponent (default n-1)");
  add_real(hs_cmd, "--p", mu.p, "p");
  add_real(hs_cmd, "--q", mu.q, "comma list, inf allowed");
  add_real(hs_cmd, "--sigma", mu.sigma, "comma list");
  hs_cmd->add_option("--J", mu.J, "levels j = 0..J in the sup")->capture_default_str();
  hs_cmd->add_option("--K", mu.K, "largest k")->capture_default_str();
  hs_cmd->add_option("--out,-o", mu.out, "CSV path")->capture_default_str();
  auto* ss_cmd = mult_cmd->add_subcommand("selfsimilar", "self-similar norm of a grid function");
  ss_cmd->add_option("--grid", mu.input, "grid file")->required();
  add_real(ss_cmd, "--s", mu.s, "smoothness");
  add_real(ss_cmd, "--p", mu.p, "p");
  add_real(ss_cmd, "--q", mu.q, "q");
  ss_cmd->add_option("--r", mu.r, "difference order")->capture_default_str();
  ss_cmd->add_option("--jmax", mu.jmax, "dyadic truncation")->capture_default_str();
  ss_cmd->add_option("--max-dilation", mu.max_dilation, "dilations j = 0..max")->capture_default_str();
  ss_cmd->add_option("--window-level", mu.window_level, "sampling level of each window")->capture_default_str();
  ss_cmd->add_option("--out,-o", mu.out, "CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, run_cmd->help());
    if (app.got_subcommand("list")) {
      for (const auto& n : experiment_names()) std::cout << n << '\n';
      return kPass;
    }
    if (*wh_cmd) return cmd_whitney(wh);
    if (*dec_cmd) return cmd_decompose(at);
    if (*rec_cmd) return cmd_reconstruct(at);
    if (*rex_cmd) return cmd_reexpand(at);
    if (*rt_cmd) return cmd_trace_roundtrip(tr);
    if (*rb_cmd) return cmd_trace_random(tr);
    if (*chi_cmd) return cmd_chi(mu);
    if (*hs_cmd) return cmd_hset(mu);
    if (*ss_cmd) return cmd_selfsimilar(mu);
  } catch (const std::exception& e) {
    std::cerr << "besovkit: " << e.what() << '\n';
    return kUsage;
  }
  std::cerr << app.help();
  return kUsage;
}
