// dimers: command-line front end.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dimers/scaling.hpp"
#include "json.hpp"

using namespace dimers;
using ojson = nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string command;
  std::string graph;
  std::vector<std::string> patterns;
  std::vector<std::string> weights;  // id=value
  int grid = 0;                      // 0: phase default
  int radius = 0;                    // 0: command default
  std::vector<std::string> eps{"1/16"};
  int n = 10000;
  std::uint64_t seed = 1;
  int threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  std::string format = "txt";
  std::vector<std::string> phis{"gaussian:0,0,0.2"};
  std::string edges = "all";
  std::string offsets;  // "x,y;x,y"
  int window = 1;
  int max_box = 256;

  ojson to_json() const {
    ojson j;
    j["command"] = command;
    j["graph"] = graph;
    j["patterns"] = patterns;
    j["weights"] = weights;
    j["grid"] = grid;
    j["radius"] = radius;
    j["eps"] = eps;
    j["n"] = n;
    j["seed"] = seed;
    j["threads"] = threads;
    j["format"] = format;
    j["phi"] = phis;
    j["edges"] = edges;
    j["offsets"] = offsets;
    j["window"] = window;
    j["max_box"] = max_box;
    return j;
  }
};

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> numbers(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

// A path to a JSON spec, or one of z2:a,b,c,d | honeycomb:a,b,c | square_octagon[:connector,square].
GraphSpec resolve_graph(const RunConfig& cfg) {
  GraphSpec g;
  const std::string& s = cfg.graph;
  if (std::filesystem::exists(s)) {
    g = load_graph_spec_file(s);
  } else if (s.rfind("z2:", 0) == 0) {
    auto v = numbers(s.substr(3));
    if (v.size() != 4) throw SpecError("z2 expects four weights a,b,c,d");
    g = make_z2(v[0], v[1], v[2], v[3]);
  } else if (s.rfind("honeycomb:", 0) == 0) {
    auto v = numbers(s.substr(10));
    if (v.size() != 3) throw SpecError("honeycomb expects three weights a,b,c");
    g = make_honeycomb(v[0], v[1], v[2]);
  } else if (s.rfind("square_octagon", 0) == 0) {
    auto v = s.size() > 15 ? numbers(s.substr(15)) : std::vector<double>{1.0, 1.0};
    if (v.size() != 2) throw SpecError("square_octagon expects connector,square weights");
    g = make_square_octagon(v[0], v[1]);
  } else {
    throw SpecError("cannot open graph spec '" + s + "'");
  }
  for (auto& w : cfg.weights) {
    auto eq = w.find('=');
    if (eq == std::string::npos) throw CliError("--weight expects id=value, got '" + w + "'");
    double val = std::stod(w.substr(eq + 1));
    g.edges[g.edge_index(w.substr(0, eq))].weight = val;
  }
  if (!cfg.weights.empty()) g = finalize_graph_spec(g);
  return g;
}

// "edge_id" or a pattern file, optionally followed by "@x,y".
Pattern resolve_pattern(const GraphSpec& g, const std::string& text) {
  std::string body = text;
  Offset o;
  auto at = text.rfind('@');
  if (at != std::string::npos) {
    auto v = numbers(text.substr(at + 1));
    if (v.size() != 2) throw CliError("pattern offset must be @x,y: " + text);
    o = {int(v[0]), int(v[1])};
    body = text.substr(0, at);
  }
  Pattern p;
  if (std::filesystem::exists(body)) {
    std::ifstream in(body);
    std::stringstream ss;
    ss << in.rdbuf();
    p = load_pattern(g, ss.str());
  } else {
    p = edge_pattern(g, body);
  }
  return p.translated(o);
}

int pattern_reach(const GraphSpec& g, const Pattern& p) {
  int r = 0;
  for (auto& e : p.edges) {
    auto w = white_end(g, e), b = black_end(g, e);
    r = std::max({r, std::abs(w.offset.x), std::abs(w.offset.y), std::abs(b.offset.x), std::abs(b.offset.y)});
  }
  return r;
}

std::string hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Output {
public:
  Output(const RunConfig& cfg, const GraphSpec& g) : cfg_(cfg), g_(g) {}
  std::string header() const {
    std::ostringstream os;
    os << "# dimers " << DIMERS_VERSION << "\n";
    os << "# graph " << g_.name << " hash " << hex(g_.hash) << "\n";
    os << "# config " << cfg_.to_json().dump() << "\n";
    return os.str();
  }
  std::vector<std::pair<std::string, std::string>> meta() const {
    return {{"version", DIMERS_VERSION}, {"graph", g_.name}, {"graph_hash", hex(g_.hash)},
            {"config", cfg_.to_json().dump()}};
  }
  void emit(const std::string& body) const {
    if (cfg_.out.empty()) {
      std::cout << body;
      return;
    }
    std::ofstream os(cfg_.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + cfg_.out);
    os << body;
  }

private:
  const RunConfig& cfg_;
  const GraphSpec& g_;
};

KernelTable table_for(const SpectralData& s, const GraphSpec& g, const RunConfig& cfg, int radius) {
  KernelOptions opt;
  opt.grid = cfg.grid;
  opt.refine = cfg.grid == 0;
  return make_kernel_table(s, g, radius, opt);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Rounded for display; tiny parts are dropped.
std::string cfmt(cplx z) {
  auto clean = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
  double re = clean(z.real()), im = clean(z.imag());
  char buf[96];
  if (im == 0.0)
    std::snprintf(buf, sizeof buf, "%.10g", re);
  else if (re == 0.0)
    std::snprintf(buf, sizeof buf, "%.10gi", im);
  else
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", re, im);
  return buf;
}

int cmd_phase(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  Output out(cfg, g);
  std::ostringstream os;
  bool csv = cfg.format == "csv";
  if (csv) {
    os << out.header() << "phase,min_abs_P,theta,phi,roots,exact\n";
    os << phase_name(s.phase) << "," << fmt(s.min_abs_P) << "," << fmt(s.min_theta) << "," << fmt(s.min_phi) << ","
       << s.roots.size() << "," << (s.exact ? 1 : 0) << "\n";
  } else {
    os << out.header();
    os << phase_name(s.phase) << "; min|P|=" << fmt(s.min_abs_P) << " at (" << cfmt(std::polar(1.0, s.min_theta))
       << "," << cfmt(std::polar(1.0, s.min_phi)) << ")\n";
    if (!s.phase_note.empty()) os << "note: " << s.phase_note << "\n";
    os << "P = " << (s.exact ? s.P.to_string() : std::string("(sampled; coefficients approximate) ") + s.P.to_string())
       << "\n";
    os << "roots: " << s.roots.size() << "\n";
    for (auto& r : s.roots) os << "  z=" << cfmt(r.z) << " w=" << cfmt(r.w) << (r.double_root ? " (double)" : "") << "\n";
    if (s.liquid) {
      auto geo = liquid_geometry(s, g);
      os << "frame: xhat=" << fmt(geo.xhat.real()) << "," << fmt(geo.xhat.imag()) << " yhat=" << fmt(geo.yhat.real())
         << "," << fmt(geo.yhat.imag()) << " area=" << fmt(geo.area) << "\n";
    }
  }
  out.emit(os.str());
  return 0;
}

int cmd_prob(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  if (cfg.patterns.empty()) throw CliError("prob needs --pattern");
  std::vector<Pattern> pats;
  int reach = 0;
  for (auto& p : cfg.patterns) {
    pats.push_back(resolve_pattern(g, p));
    reach = std::max(reach, pattern_reach(g, pats.back()));
  }
  auto t = table_for(s, g, cfg, std::max(cfg.radius, 2 * reach + 2));
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header() << "pattern,probability,method\n";
  for (size_t i = 0; i < pats.size(); ++i) {
    auto pa = pattern_probability(t, g, pats[i], &s);
    os << cfg.patterns[i] << "," << fmt(pa.probability) << "," << method_name(t.method) << "\n";
  }
  out.emit(os.str());
  return 0;
}

int cmd_joint(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  if (cfg.patterns.size() < 2) throw CliError("joint needs at least two --pattern");
  std::vector<Pattern> pats;
  int reach = 0;
  for (auto& p : cfg.patterns) {
    pats.push_back(resolve_pattern(g, p));
    reach = std::max(reach, pattern_reach(g, pats.back()));
  }
  auto t = table_for(s, g, cfg, std::max(cfg.radius, 2 * reach + 2));
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header() << "joint_probability,method\n" << fmt(joint_probability(t, g, pats)) << ","
     << method_name(t.method) << "\n";
  out.emit(os.str());
  return 0;
}

int cmd_cov(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  if (cfg.patterns.size() != 2) throw CliError("cov needs exactly two --pattern");
  auto p1 = resolve_pattern(g, cfg.patterns[0]), p2 = resolve_pattern(g, cfg.patterns[1]);
  std::vector<Offset> offs;
  if (!cfg.offsets.empty()) {
    std::stringstream ss(cfg.offsets);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      auto v = numbers(tok);
      if (v.size() != 2) throw CliError("offsets must be x,y;x,y;...");
      offs.push_back({int(v[0]), int(v[1])});
    }
  } else {
    int R = std::max(cfg.radius, 1);
    for (int y = -R; y <= R; ++y)
      for (int x = -R; x <= R; ++x) offs.push_back({x, y});
  }
  int far = 0;
  for (auto o : offs) far = std::max({far, std::abs(o.x), std::abs(o.y)});
  int reach = pattern_reach(g, p1) + pattern_reach(g, p2) + 2;
  auto t = table_for(s, g, cfg, far + reach);
  double m1 = edge_set_probability(t, g, p1.edges), m2 = edge_set_probability(t, g, p2.edges);
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header() << "x,y,covariance\n";
  for (auto o : offs) os << o.x << "," << o.y << "," << fmt(pattern_covariance(t, g, p1, p2, o, m1, m2)) << "\n";
  out.emit(os.str());
  return 0;
}

int cmd_amplitude(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  std::vector<int> edges;
  if (cfg.edges == "all") {
    for (int e = 0; e < int(g.edges.size()); ++e) edges.push_back(e);
  } else {
    std::stringstream ss(cfg.edges);
    std::string tok;
    while (std::getline(ss, tok, ',')) edges.push_back(g.edge_index(tok));
  }
  LiquidOptions opt;
  opt.max_box = cfg.max_box;
  auto r = amplitude_report(g, s, edges, opt);
  Output out(cfg, g);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << out.header() << "p1,p2,gff_coefficient,dipole1_re,dipole1_im,dipole2_re,dipole2_im,white_noise,method,error\n";
    for (auto& e : r.entries)
      os << e.p1 << "," << e.p2 << "," << fmt(e.gff_coefficient) << "," << fmt(e.dipole1.real()) << ","
         << fmt(e.dipole1.imag()) << "," << fmt(e.dipole2.real()) << "," << fmt(e.dipole2.imag()) << ","
         << fmt(e.white_noise) << "," << e.method << "," << fmt(e.error) << "\n";
    out.emit(os.str());
  } else {
    out.emit(amplitude_report_text(r, out.meta()));
  }
  return 0;
}

int cmd_free_energy(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = build_spectral(g);
  int N = cfg.grid ? cfg.grid : 256;
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header() << "grid,free_energy\n" << N << "," << fmt(free_energy(s, N)) << "\n";
  out.emit(os.str());
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  // Window: every edge class on the translates |x|,|y| <= window - 1.
  std::vector<PatternEdge> win;
  const int W = std::max(cfg.window, 1) - 1;
  for (int y = -W; y <= W; ++y)
    for (int x = -W; x <= W; ++x)
      for (int e = 0; e < int(g.edges.size()); ++e) win.push_back({e, {x, y}});
  auto t = table_for(s, g, cfg, std::max(cfg.radius, 2 * W + 3));
  WindowSampler sampler(t, g, win);
  auto recs = sample_window(sampler, cfg.n, cfg.seed, cfg.threads);
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header() << "# edges";
  for (auto& e : sampler.edges()) os << " " << g.edges[e.edge].id << "@" << e.offset.x << "," << e.offset.y;
  os << "\n";
  std::string wid = "box" + std::to_string(cfg.window);
  for (auto& r : recs) os << format_sample(r, wid) << "\n";
  out.emit(os.str());
  return 0;
}

int cmd_clt(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  if (cfg.patterns.size() != 1) throw CliError("clt needs exactly one --pattern");
  CltConfig c;
  c.pattern = resolve_pattern(g, cfg.patterns[0]);
  for (auto& p : cfg.phis) c.phis.push_back(parse_test_function(p));
  for (auto& e : cfg.eps) c.eps.push_back(parse_rational(e));
  c.n_samples = cfg.n;
  c.seed = cfg.seed;
  c.threads = cfg.threads;
  if (s.phase == Phase::gaseous && c.pattern.edges.size() == 1) {
    c.amplitude = white_noise_gaseous(g, s, c.pattern.edges[0].edge).value;
  } else if (s.phase == Phase::liquid_generic) {
    LiquidOptions opt;
    opt.max_box = cfg.max_box;
    auto geo = liquid_geometry(s, g);
    auto t = make_kernel_table(s, g, opt.max_box + 2 * pattern_reach(g, c.pattern) + 2);
    auto L = white_noise_liquid(t, g, s, geo, c.pattern, c.pattern, opt);
    c.amplitude = L.value;
    c.gff_coefficient = 1.0 / 3.14159265358979323846;
    c.dipole = L.dipole1;
  } else {
    auto t = make_kernel_table(s, g, 40);
    c.amplitude = white_noise_lattice_sum(t, g, c.pattern, c.pattern, 30);
  }
  auto rows = clt_harness(g, s, c);
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header();
  if (cfg.format == "csv") {
    os << moment_table_csv(rows);
  } else {
    os << moment_table_csv(rows);
    for (auto& r : rows)
      os << "# eps=" << r.eps_text << " " << r.phi_id << " sites=" << r.window_sites << " skewness=" << fmt(r.skewness)
         << "+-" << fmt(r.skewness_se) << " kurtosis_ratio=" << fmt(r.kurtosis_ratio) << "+-"
         << fmt(r.kurtosis_ratio_se) << " var/predicted=" << fmt(r.var / r.predicted_var) << "\n";
  }
  out.emit(os.str());
  return 0;
}

// Quick invariant suite on one graph.
int cmd_check(const RunConfig& cfg) {
  auto g = resolve_graph(cfg);
  auto s = analyze_spectral(g);
  Output out(cfg, g);
  std::ostringstream os;
  os << out.header();
  int failures = 0;
  auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    os << (ok ? "PASS " : "FAIL ") << name << " " << detail << "\n";
    failures += !ok;
  };
  auto t = table_for(s, g, cfg, std::max(cfg.radius, 8));
  const bool gas = s.phase == Phase::gaseous;
  for (int v = 0; v < g.n; ++v)
    for (Color col : {Color::white, Color::black}) {
      double sum = 0.0;
      for (int e = 0; e < int(g.edges.size()); ++e) {
        const auto& es = g.edges[e];
        if (col == Color::white && es.white == v) sum += edge_set_probability(t, g, {{e, {0, 0}}});
        if (col == Color::black && es.black == v) sum += edge_set_probability(t, g, {{e, -es.offset}});
      }
      double tol = gas ? 1e-7 : 1e-4;
      line(std::string("vertex_sum ") + (col == Color::white ? "w" : "b") + std::to_string(v),
           std::abs(sum - 1.0) <= tol, "residual=" + fmt(sum - 1.0));
    }
  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    PatternEdge a{int(rng() % g.edges.size()), {0, 0}};
    PatternEdge b{int(rng() % g.edges.size()), {int(rng() % 7) - 3, int(rng() % 7) - 3}};
    if (a == b) continue;
    worst = std::max(worst, std::abs(inclusion_exclusion_check(t, g, a, b)));
  }
  line("inclusion_exclusion", worst <= 1e-8, "max_residual=" + fmt(worst));
  double cyc = 0.0;
  for (int m = 3; m <= 7; ++m) {
    std::normal_distribution<double> nd;
    std::vector<cplx> u(m);
    for (auto& x : u) x = {nd(rng), nd(rng)};
    auto c = cycle_cancellation(u);
    cyc = std::max(cyc, std::abs(c.sum) / c.max_term);
  }
  line("cycle_cancellation", cyc <= 1e-10, "max_relative=" + fmt(cyc));
  out.emit(os.str());
  return failures ? 3 : 0;
}

void print_error(const std::string& kind, const std::string& msg, const RunConfig& cfg) {
  ojson j;
  j["error"]["kind"] = kind;
  j["error"]["message"] = msg;
  j["error"]["command"] = cfg.command;
  j["error"]["version"] = DIMERS_VERSION;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Dimer model correlations, amplitudes and fluctuation checks"};
  app.set_version_flag("--version", std::string(DIMERS_VERSION));
  app.require_subcommand(1);

  auto common = [&](CLI::App* sc) {
    sc->add_option("graph", cfg.graph, "Graph spec file, or z2:a,b,c,d | honeycomb:a,b,c | square_octagon")->required();
    sc->add_option("--weight", cfg.weights, "Override an edge weight: id=value (repeatable)");
    sc->add_option("--grid", cfg.grid, "FFT grid size (0: phase default, refined path for liquid graphs)");
    sc->add_option("--radius", cfg.radius, "Kernel table radius / offset range");
    sc->add_option("--out", cfg.out, "Output file (default stdout)");
    sc->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "txt"}));
    sc->add_option("--seed", cfg.seed, "RNG seed");
    sc->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* phase = app.add_subcommand("phase", "Characteristic polynomial, torus roots and phase");
  common(phase);
  auto* prob = app.add_subcommand("prob", "Pattern probabilities");
  common(prob);
  prob->add_option("--pattern", cfg.patterns, "Edge id or pattern file, optionally @x,y")->required();
  auto* joint = app.add_subcommand("joint", "Joint probability of several translated patterns");
  common(joint);
  joint->add_option("--pattern", cfg.patterns, "Edge id or pattern file, optionally @x,y")->required();
  auto* cov = app.add_subcommand("cov", "Pattern covariances over offsets");
  common(cov);
  cov->add_option("--pattern", cfg.patterns, "Two patterns")->required();
  cov->add_option("--offsets", cfg.offsets, "x,y;x,y;... (default: box of --radius)");
  auto* amp = app.add_subcommand("amplitude", "Limit covariance coefficients");
  common(amp);
  amp->add_option("--edges", cfg.edges, "all or comma-separated edge ids");
  amp->add_option("--max-box", cfg.max_box, "Largest box for liquid lattice sums");
  auto* fe = app.add_subcommand("free-energy", "Free energy per fundamental domain");
  common(fe);
  auto* smp = app.add_subcommand("sample", "Exact window samples");
  common(smp);
  smp->add_option("--n", cfg.n, "Number of samples")->check(CLI::PositiveNumber);
  smp->add_option("--window", cfg.window, "Window of translates with |x|,|y| < window");
  auto* clt = app.add_subcommand("clt", "Empirical moments of the fluctuation field");
  common(clt);
  clt->add_option("--pattern", cfg.patterns, "Edge id or pattern file")->required();
  clt->add_option("--phi", cfg.phis, "Test function gaussian:cx,cy,w or spline:cx,cy,h (repeatable)");
  clt->add_option("--eps", cfg.eps, "Scale as an exact rational p/q (repeatable)");
  clt->add_option("--n", cfg.n, "Samples per (eps, phi)");
  clt->add_option("--max-box", cfg.max_box, "Largest box for liquid lattice sums");
  auto* chk = app.add_subcommand("check", "Invariant suite on one graph");
  common(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    cfg.command = "parse";
    print_error("usage", e.what(), cfg);
    return 64;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "phase") return cmd_phase(cfg);
    if (cfg.command == "prob") return cmd_prob(cfg);
    if (cfg.command == "joint") return cmd_joint(cfg);
    if (cfg.command == "cov") return cmd_cov(cfg);
    if (cfg.command == "amplitude") return cmd_amplitude(cfg);
    if (cfg.command == "free-energy") return cmd_free_energy(cfg);
    if (cfg.command == "sample") return cmd_sample(cfg);
    if (cfg.command == "clt") return cmd_clt(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
  } catch (const SpecError& e) {
    print_error("spec", e.what(), cfg);
    return 2;
  } catch (const SamplerError& e) {
    print_error("sampler", e.what(), cfg);
    return 4;
  } catch (const std::exception& e) {
    print_error("runtime", e.what(), cfg);
    return 1;
  }
  return 1;
}
