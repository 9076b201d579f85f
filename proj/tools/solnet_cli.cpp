// solnet: batch driver. Each subcommand reads a JSON config and writes JSON or CSV.
// Exit codes: 0 success, 2 input error, 3 numeric failure.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <solnet/solnet.hpp>
#include <solnet/spec_json.hpp>

namespace {

using namespace solnet;

#ifndef SOLNET_VERSION
#define SOLNET_VERSION "0.0.0"
#endif

struct RunContext {
  json config;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string out;
};

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::input, "cannot open output file " + path);
    f << content;
    if (!f) fail(ErrorKind::input, "write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

json metadata(const RunContext& ctx) {
  return {{"config_hash", ctx.config_hash}, {"seed", ctx.seed}, {"version", SOLNET_VERSION}};
}

std::string csv_header(const RunContext& ctx) {
  return "# config_hash=" + ctx.config_hash + " seed=" + std::to_string(ctx.seed) + " version=" SOLNET_VERSION "\n";
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_json(const RunContext& ctx, json body) {
  body["meta"] = metadata(ctx);
  write_atomic(ctx.out, body.dump(2) + "\n");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::input, std::string("bad value for '") + key + "': " + e.what());
  }
}

FourierSeries field_fourier(const json& spec, int K) { return fourier_coeffs(parse_field(spec), K); }

int trig_degree(const json& spec) {
  int deg = 0;
  if (spec.contains("cos")) deg = std::max<int>(deg, static_cast<int>(spec.at("cos").size()) - 1);
  if (spec.contains("sin")) deg = std::max<int>(deg, static_cast<int>(spec.at("sin").size()));
  if (spec.contains("line_bump")) fail(ErrorKind::input, "commutator fields must be trigonometric polynomials");
  return deg;
}

// ---------------------------------------------------------------------------------------------

void cmd_lambda_decay(const RunContext& ctx) {
  const json& c = ctx.config;
  CircleMap g = parse_diffeo(detail::field_of(c, "gamma"));
  double s = detail::number_of(c, "s");
  int pmax = get_or<int>(c, "pmax", 96);
  int quad = get_or<int>(c, "quad_points", 0);
  bool self_check = get_or<bool>(c, "self_check", false);
  DecayReport r = lambda_decay_report(g, s, pmax, quad, self_check);
  std::string csv = csv_header(ctx) + "m,n,abs_lambda,weighted\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    csv += std::to_string(r.grid[i].first) + "," + std::to_string(r.grid[i].second) + "," + num(r.values[i]) + "," +
           num(r.weighted[i]) + "\n";
  json body = {{"s", s},
               {"pmax", pmax},
               {"sup_weighted", r.sup_weighted},
               {"fitted_constant", r.fitted_constant},
               {"fitted_exponent", r.fitted_exponent},
               {"degenerate", r.degenerate},
               {"self_check", r.self_check}};
  if (ctx.out.empty() || ctx.out == "-") {
    body["meta"] = metadata(ctx);
    std::cout << body.dump(2) << "\n" << csv;
    return;
  }
  std::filesystem::path p(ctx.out);
  write_atomic(std::filesystem::path(p).replace_extension(".csv").string(), csv);
  write_json(ctx, body);
}

void cmd_hs_sweep(const RunContext& ctx) {
  const json& c = ctx.config;
  const json& spec = detail::field_of(c, "gamma");
  CircleMap g = parse_diffeo(spec);
  std::vector<int> cutoffs = get_or<std::vector<int>>(c, "cutoffs", {64, 128, 256, 512});
  VerdictThresholds th;
  th.converged_tail = get_or<double>(c, "converged_tail", th.converged_tail);
  th.diverging_growth = get_or<double>(c, "diverging_growth", th.diverging_growth);
  require(th.converged_tail > 0 && th.diverging_growth > 0, ErrorKind::input, "thresholds must be positive");
  HsSweep sw = hs_norm_sweep(g, cutoffs, th);
  json body = {{"gamma_spec", spec}, {"cutoffs", sw.cutoffs}, {"hs", sw.hs}, {"verdict", sw.verdict},
               {"tail", sw.tail}, {"growth", sw.growth}};
  body["s_hint"] = c.contains("s_hint") ? c.at("s_hint") : json(nullptr);
  write_json(ctx, body);
}

void cmd_kac(const RunContext& ctx) {
  const json& c = ctx.config;
  auto cs = get_or<std::vector<double>>(c, "c_values", {});
  auto hs = get_or<std::vector<double>>(c, "h_values", {});
  int max_level = get_or<int>(c, "max_level", 4);
  require(!cs.empty() && !hs.empty(), ErrorKind::input, "c_values and h_values are required");
  require(max_level >= 0 && max_level <= 12, ErrorKind::input, "max_level must be in 0..12");
  std::string csv = csv_header(ctx) + "level,c,h,det,min_eigenvalue\n";
  for (double cv : cs)
    for (double hv : hs) {
      VermaModule mod({cv, hv, max_level});
      for (int l = 0; l <= max_level; ++l) {
        Eigen::MatrixXd G = mod.gram(l);
        double det = G.determinant();
        double mine = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
        csv += std::to_string(l) + "," + num(cv) + "," + num(hv) + "," + num(det) + "," + num(mine) + "\n";
      }
    }
  write_atomic(ctx.out, csv);
}

void cmd_commutator(const RunContext& ctx) {
  const json& c = ctx.config;
  double cc = detail::number_of(c, "c"), h = detail::number_of(c, "h");
  int N = get_or<int>(c, "N", 15);
  const json& fs = detail::field_of(c, "f");
  const json& gs = detail::field_of(c, "g");
  int K = std::max(trig_degree(fs), trig_degree(gs));
  require(3 * K <= N, ErrorKind::input, "field modes must be at most N/3");
  VermaModule mod({cc, h, N});
  CommutatorReport r = commutator_check(mod, field_fourier(fs, K), field_fourier(gs, K));
  write_json(ctx, {{"c", cc}, {"h", h}, {"N", N}, {"f", fs}, {"g", gs}, {"exact_block_dim", r.exact_block_dim},
                   {"residual", r.residual}});
}

void cmd_qei(const RunContext& ctx) {
  const json& c = ctx.config;
  double cc = detail::number_of(c, "c");
  double h = get_or<double>(c, "h", 0.0);
  int N = get_or<int>(c, "N", 10);
  int trials = get_or<int>(c, "trials", 100);
  VectorField f = parse_field(detail::field_of(c, "field"));
  VermaModule mod({cc, h, N});
  QeiReport r = qei_check(mod, f, cc, trials, ctx.seed);
  write_json(ctx, {{"c", cc}, {"h", h}, {"N", N}, {"trials", trials}, {"bound", r.bound},
                   {"min_expectation", r.min_expectation}, {"min_gap", r.min_gap},
                   {"min_eigenvalue", r.min_eigenvalue}, {"exact_level", r.exact_level}});
}

void cmd_soliton_classify(const RunContext& ctx) {
  const json& c = ctx.config;
  const json& list = detail::field_of(c, "solitons");
  require(list.is_array(), ErrorKind::input, "'solitons' must be an array");
  double tol = get_or<double>(c, "tol", kDefaultRTol);
  require(tol > 0, ErrorKind::input, "tol must be positive");
  std::vector<SolitonDescriptor> ds;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ds.push_back(make_soliton(parse_soliton(list[i])));
    ids.push_back(list[i].contains("id") ? list[i].at("id").get<std::string>() : std::to_string(i));
  }
  std::vector<int> rep = equivalence_representatives(ds, tol);
  std::string csv = csv_header(ctx) + "id,r,proper,equivalence_class_representative\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    csv += ids[i] + "," + num(ds[i].r) + "," + (is_proper(ds[i], tol) ? "true" : "false") + "," + ids[rep[i]] + "\n";
  write_atomic(ctx.out, csv);
}

OneParticleVector parse_vector(const json& j, int K) {
  // {"k": [re, im], ...} with positive k; negative modes follow by reality.
  require(j.is_object(), ErrorKind::input, "one-particle vector must be an object of modes");
  OneParticleVector v(K);
  for (auto it = j.begin(); it != j.end(); ++it) {
    int k = 0;
    try {
      k = std::stoi(it.key());
    } catch (...) {
      fail(ErrorKind::input, "mode keys must be integers");
    }
    require(k >= 1 && k <= K, ErrorKind::input, "mode outside 1..K");
    auto z = it.value().get<std::vector<double>>();
    require(z.size() == 2, ErrorKind::input, "mode value must be [re, im]");
    v.at(k) = {z[0], z[1]};
    v.at(-k) = {z[0], -z[1]};
  }
  return v;
}

void cmd_weyl_check(const RunContext& ctx) {
  const json& c = ctx.config;
  auto modes = get_or<std::vector<int>>(c, "modes", {1});
  int n_max = get_or<int>(c, "n_max", 40);
  TruncatedFock fock(modes, n_max);
  int K = *std::max_element(modes.begin(), modes.end());
  OneParticleVector f = parse_vector(detail::field_of(c, "f"), K), g = parse_vector(detail::field_of(c, "g"), K);
  std::vector<int> safe = fock.safe_sector();
  Eigen::MatrixXcd Wf = weyl_matrix(fock, f), Wg = weyl_matrix(fock, g), Wfg = weyl_matrix(fock, f + g);
  cd phase = std::exp(cd(0.0, -0.5 * inner(f, g).imag()));
  double weyl = sector_columns(Wf * Wg - phase * Wfg, safe).cwiseAbs().maxCoeff();
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(fock.dim(), fock.dim());
  double unit = sector_columns(Wf.adjoint() * Wf - I, safe).cwiseAbs().maxCoeff();
  write_json(ctx, {{"modes", modes}, {"n_max", n_max}, {"dimension", fock.dim()}, {"safe_sector_dimension", safe.size()},
                   {"weyl_relation_residual", weyl}, {"unitarity_residual", unit}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solnet: circle diffeomorphisms, Virasoro modules, U(1) current and soliton diagnostics"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::uint64_t seed = 12345;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_path, "output path ('-' or empty for stdout)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads (default: SOLNET_THREADS or hardware)");
  app.fallthrough();

  std::vector<std::pair<std::string, void (*)(const RunContext&)>> cmds = {
      {"lambda-decay", cmd_lambda_decay}, {"hs-sweep", cmd_hs_sweep}, {"kac", cmd_kac},
      {"commutator", cmd_commutator},     {"qei", cmd_qei},           {"soliton-classify", cmd_soliton_classify},
      {"weyl-check", cmd_weyl_check}};
  for (auto& [name, fn] : cmds) app.add_subcommand(name, name + " report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (threads < 0) fail(ErrorKind::input, "--threads must be >= 0");
    thread_setting() = threads;
    RunContext ctx;
    ctx.seed = seed;
    ctx.out = out_path;
    std::ifstream in(config_path);
    if (!in) fail(ErrorKind::input, "cannot read config " + config_path);
    try {
      ctx.config = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::input, std::string("config parse error: ") + e.what());
    }
    ctx.config_hash = fnv1a_hex(ctx.config.dump());
    for (auto& [name, fn] : cmds)
      if (app.got_subcommand(name)) fn(ctx);
  } catch (const Error& e) {
    std::cerr << "solnet: " << e.what() << "\n";
    return e.is_input_error() ? 2 : 3;
  } catch (const json::exception& e) {
    std::cerr << "solnet: input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solnet: numeric: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
