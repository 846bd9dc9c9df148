// Command-line front end: solve one instance, generate benchmark classes,
// run the benchmark harness, or search for an optimized rounding scheme.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmax/cmax.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cmax::ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw cmax::ParseError("cannot open file for writing: " + path);
  out << text;
}

// One class per non-comment line: family m n lo hi count seed
std::vector<cmax::ClassSpec> parse_classes(const std::string& text) {
  std::vector<cmax::ClassSpec> classes;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line.substr(line.find_first_not_of(" \t") == std::string::npos
                                          ? line.size()
                                          : line.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::istringstream ls(trimmed);
    std::string fam;
    cmax::ClassSpec spec;
    if (!(ls >> fam >> spec.m >> spec.n >> spec.lo >> spec.hi >> spec.count >> spec.seed))
      throw cmax::ParseError("classes file line " + std::to_string(lineno) +
                             ": expected 'family m n lo hi count seed'");
    spec.family = cmax::parse_family(fam);
    classes.push_back(spec);
  }
  if (classes.empty()) throw cmax::ParseError("classes file defines no classes");
  return classes;
}

int run_solve(const std::string& input, const std::string& eps_s, const std::string& eps_prime_s,
              const std::string& scheme_path, double time_limit) {
  cmax::Instance inst = cmax::parse_instance(read_file(input));
  cmax::LrtpConfig cfg;
  cfg.eps = cmax::parse_rat(eps_s);
  cfg.eps_prime = cmax::parse_rat(eps_prime_s);
  if (!scheme_path.empty()) {
    cmax::RoundingScheme s = cmax::read_scheme(read_file(scheme_path));
    std::string why;
    if (!cmax::verify_scheme(s, &why))
      throw cmax::ContractViolation("loaded scheme fails verification: " + why);
    cfg.scheme = std::move(s);
  }
  if (time_limit > 0) cfg.time_limit_seconds = time_limit;

  cmax::LrtpResult res = cmax::lrtp_solve(inst, cfg);
  if (res.fallback) std::cerr << "warning: " << res.warning << "\n";
  std::cout << "makespan " << cmax::rat_str(res.schedule.makespan()) << "\n";
  for (int k = 0; k < res.schedule.m; ++k) {
    std::cout << "machine " << k << ":";
    for (int j = 0; j < inst.n(); ++j)
      if (res.schedule.assignment[j] == k) std::cout << " " << j;
    std::cout << "\n";
  }
  return 0;
}

int run_generate(const std::string& family, int m, int n, long long lo, long long hi, int count,
                 std::uint64_t seed, const std::string& out_dir) {
  cmax::ClassSpec spec;
  spec.family = cmax::parse_family(family);
  spec.m = m;
  spec.n = n;
  spec.lo = lo;
  spec.hi = hi;
  spec.count = count;
  spec.seed = seed;
  std::filesystem::create_directories(out_dir);
  std::vector<cmax::Instance> instances = cmax::generate_class(spec);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::ostringstream name;
    name << family << "_m" << m << "_n" << n << "_"
         << std::setw(4) << std::setfill('0') << i << ".txt";
    write_file((std::filesystem::path(out_dir) / name.str()).string(),
               cmax::write_instance(instances[i]));
  }
  std::cout << "wrote " << instances.size() << " instances to " << out_dir << "\n";
  return 0;
}

int run_bench(const std::string& classes_path, const std::string& eps_s, const std::string& out_csv,
              double time_limit) {
  std::vector<cmax::ClassSpec> classes = parse_classes(read_file(classes_path));
  cmax::LrtpConfig cfg;
  cfg.eps = cmax::parse_rat(eps_s);
  if (time_limit > 0) cfg.time_limit_seconds = time_limit;
  std::vector<cmax::BenchRow> rows = cmax::bench_run(classes, cfg, out_csv);
  for (const cmax::BenchRow& r : rows) {
    std::cout << cmax::family_name(r.family) << " m=" << r.m << " n=" << r.n << " U=" << r.u
              << " better=" << r.better << " equal=" << r.equal
              << " avg_quot=" << cmax::rat_fixed(r.avg_quot, 2) << " avg_time=" << r.avg_time;
    if (r.failures > 0) std::cout << " failures=" << r.failures;
    std::cout << "\n";
  }
  std::cout << "csv written to " << out_csv << "\n";
  return 0;
}

int run_optimize(int d, int l, const std::string& tol_s, const std::string& lo_s,
                 const std::string& hi_s, bool tight_bottom, const std::string& emit_lp,
                 const std::string& scheme_out) {
  cmax::SchemeSearchOptions opt;
  opt.tight_bottom = tight_bottom;
  cmax::Rat lo = cmax::parse_rat(lo_s), hi = cmax::parse_rat(hi_s);
  auto res = cmax::optimize_scheme(d, l, lo, hi, cmax::parse_rat(tol_s), opt);
  if (!res) {
    std::cerr << "no scheme with d=" << d << " and L=" << l << " exists at eps=" << hi_s
              << "; try a larger upper end or a larger d\n";
    return 3;
  }
  std::cout << "eps " << cmax::rat_fixed(res->eps, 12) << " (exact " << cmax::rat_str(res->eps)
            << ")\n";
  std::cout << "sizes";
  for (const cmax::Rat& x : res->scheme.sizes) std::cout << " " << cmax::rat_fixed(x, 9);
  std::cout << "\n";
  std::cout << "triples " << res->scheme.triples.size() << ", L " << res->scheme.L << ", probes "
            << res->stats.probes << ", LP solves " << res->stats.lp_solves << "\n";
  if (!scheme_out.empty()) {
    write_file(scheme_out, cmax::write_scheme(res->scheme));
    std::cout << "scheme written to " << scheme_out << "\n";
  }
  if (!emit_lp.empty()) {
    write_file(emit_lp, cmax::emit_milp(d, l, res->eps));
    std::cout << "MILP model written to " << emit_lp << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Makespan scheduling toolkit: approximation pipeline, heuristics, benchmarks"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  std::string in_path, eps = "1/4", eps_prime = "1/10000", scheme_path;
  double time_limit = 0;
  solve->add_option("--input", in_path, "instance file ('m n' header, then times)")->required();
  solve->add_option("--eps", eps, "target precision (rational or decimal)");
  solve->add_option("--eps-prime", eps_prime, "binary search termination ratio");
  solve->add_option("--scheme", scheme_path, "optimized rounding scheme file");
  solve->add_option("--time-limit", time_limit, "soft wall-clock limit in seconds");

  auto* gen = app.add_subcommand("generate", "Generate a class of benchmark instances");
  std::string family = "E1", out_dir = ".";
  int gm = 3, gn = 6, gcount = 100;
  long long glo = 1, ghi = 20;
  std::uint64_t gseed = 1;
  gen->add_option("--family", family, "family label (E1, E2, E3, E4, BIG)");
  gen->add_option("--m", gm, "machine count")->required();
  gen->add_option("--n", gn, "job count")->required();
  gen->add_option("--lo", glo, "smallest processing time");
  gen->add_option("--hi", ghi, "largest processing time");
  gen->add_option("--count", gcount, "number of instances");
  gen->add_option("--seed", gseed, "base seed (instance i uses seed XOR i)");
  gen->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "Run the benchmark harness over classes");
  std::string classes_path, out_csv = "bench.csv", bench_eps = "1/4";
  double bench_limit = 0;
  bench->add_option("--classes", classes_path,
                    "classes file: 'family m n lo hi count seed' per line")->required();
  bench->add_option("--eps", bench_eps, "target precision for the pipeline");
  bench->add_option("--out", out_csv, "output CSV path");
  bench->add_option("--time-limit", bench_limit, "per-instance soft limit in seconds");

  auto* opt = app.add_subcommand("optimize-rounding", "Search for the best rounding scheme");
  int od = 9, ol = 4;
  std::string tol = "1/100000000", olo = "1/10", ohi = "1/4", emit_lp, scheme_out;
  bool tight_bottom = false;
  opt->add_option("--d", od, "number of sizes in the menu")->required();
  opt->add_option("--l", ol, "compression bound L")->required();
  opt->add_option("--tol", tol, "bisection tolerance");
  opt->add_option("--eps-lo", olo, "lower end of the precision bracket");
  opt->add_option("--eps-hi", ohi, "upper end of the precision bracket (must be feasible)");
  opt->add_flag("--tight-bottom", tight_bottom, "cap the smallest size at eps, not eps(1+eps)");
  opt->add_option("--emit-lp", emit_lp, "also write the feasibility MILP in LP format");
  opt->add_option("--scheme-out", scheme_out, "write the witness scheme file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(in_path, eps, eps_prime, scheme_path, time_limit);
    if (*gen) return run_generate(family, gm, gn, glo, ghi, gcount, gseed, out_dir);
    if (*bench) return run_bench(classes_path, bench_eps, out_csv, bench_limit);
    if (*opt) return run_optimize(od, ol, tol, olo, ohi, tight_bottom, emit_lp, scheme_out);
  } catch (const cmax::ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
