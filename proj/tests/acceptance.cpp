// Acceptance suite: every criterion is driven through the command-line tool
// with real config files, then the whole suite is rerun at another thread
// count and the emitted reports are compared byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "shellhier/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Case {
  std::string name;
  std::vector<std::string> command;  ///< subcommand words
  json config;
  std::vector<std::string> extra;    ///< extra command-line arguments
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  return buf;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<double> sweep(int from, int to) {
  std::vector<double> h;
  for (int k = from; k <= to; ++k) h.push_back(std::ldexp(1.0, -k));
  return h;
}

json rolled(double R) {
  const std::string r = num(R);
  return json::array({r + "*sin(u/" + r + ")", "v", r + "*(1-cos(u/" + r + "))"});
}

json kirchhoff_scaling(double R) {
  return {{"surface", {{"family", "plate"}, {"grid", 32}}},
          {"material", {{"mu", 1.0}, {"lambda", 1.0}}},
          {"regime", "kirchhoff"},
          {"inputs", {{"y", rolled(R)}}},
          {"h_list", sweep(4, 8)},
          {"target", {{"functional", "kirchhoff"}, {"normalization", "scaled"}, {"tolerance", 0.02}}}};
}

// Random smooth out-of-plane field (0, 0, phi) as an expression.
json random_out_of_plane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), freq(-3.0, 3.0), phase(0.0, 6.283185307179586);
  std::string phi;
  for (int k = 0; k < 4; ++k) {
    if (k) phi += " + ";
    phi += "(" + num(amp(rng)) + ")*sin((" + num(freq(rng)) + ")*u + (" + num(freq(rng)) + ")*v + " +
           num(phase(rng)) + ")";
  }
  return json::array({"0", "0", phi});
}

std::vector<Case> build_cases() {
  std::vector<Case> cases;
  const json plate16 = {{"family", "plate"}, {"grid", 16}};
  const json cap16 = {{"family", "spherical_cap"},
                      {"params", {{"radius", 1.0}, {"polar_angle", 1.0471975511965976}}},
                      {"grid", 16}};

  cases.push_back({"a1_scaling", {"scaling", "run"}, kirchhoff_scaling(2.0), {}});
  json eq = kirchhoff_scaling(2.0);
  eq.erase("target");
  eq.erase("material");
  cases.push_back({"a1_equipartition", {"equipartition", "run"}, eq, {}});
  cases.push_back({"a2_R1.5", {"scaling", "run"}, kirchhoff_scaling(1.5), {}});
  cases.push_back({"a2_R3", {"scaling", "run"}, kirchhoff_scaling(3.0), {}});

  cases.push_back({"a3_vonkarman",
                   {"scaling", "run"},
                   {{"surface", {{"family", "plate"}, {"grid", 32}}},
                    {"regime", "vonkarman"},
                    {"inputs", {{"V", {"0", "0", "0.5*sin(pi*u)*sin(pi*v)"}}, {"w", "project"}}},
                    {"h_list", sweep(4, 8)},
                    {"target", {{"functional", "vonkarman"}}}},
                   {}});

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mu(0.2, 3.0), lambda(-0.3, 4.0);
  for (int k = 0; k < 5; ++k) {
    const double m = mu(rng);
    cases.push_back({"a4_material_" + std::to_string(k),
                     {"material", "check"},
                     {{"material", {{"mu", m}, {"lambda", std::max(lambda(rng), -0.5 * m)}}}, {"samples", 1000}},
                     {"--seed", std::to_string(100 + k)}});
  }
  cases.push_back({"a5_material", {"material", "check"}, {{"samples", 10000}, {"seed", 5}}, {}});

  cases.push_back({"a6_cap", {"isometry", "solve"}, {{"surface", cap16}, {"count", 2}}, {}});
  json fields = json::array();
  for (int k = 0; k < 20; ++k) fields.push_back(random_out_of_plane(rng));
  cases.push_back({"a6_plate", {"isometry", "solve"}, {{"surface", plate16}, {"count", 0}, {"fields", fields}}, {}});

  cases.push_back({"a7_matching",
                   {"match", "run"},
                   {{"surface", cap16}, {"V", {{"mode", 0}}}, {"eps_list", {0.1, 0.05, 0.025, 0.0125}}},
                   {}});

  for (const char* beta : {"4", "3", "2.6666666666666667", "2.5"})
    cases.push_back({std::string("a8_beta_") + beta, {"classify"}, nullptr, {"--beta", beta}});
  for (const char* alpha : {"1", "2", "3"})
    cases.push_back({std::string("a8_alpha_") + alpha, {"classify"}, nullptr, {"--alpha", alpha}});

  cases.push_back({"a9_order1",
                   {"isometry", "solve"},
                   {{"surface", plate16}, {"count", 0}, {"hierarchy", {{"0", "0", "u^2"}}}},
                   {}});
  cases.push_back({"a9_order2",
                   {"isometry", "solve"},
                   {{"surface", plate16}, {"count", 0}, {"hierarchy", {{"0", "0", "u^2"}, {"-2*u^3/3", "0", "u"}}}},
                   {}});

  cases.push_back({"a10_u2",
                   {"isometry", "solve"},
                   {{"surface", plate16}, {"count", 0}, {"plate_check", {"0", "0", "u^2"}}},
                   {}});
  cases.push_back({"a10_u2v2",
                   {"isometry", "solve"},
                   {{"surface", plate16}, {"count", 0}, {"plate_check", {"0", "0", "u^2+v^2"}}},
                   {}});
  return cases;
}

struct SuiteRun {
  std::map<std::string, json> reports;
  std::map<std::string, int> exit_codes;
};

SuiteRun run_suite(const std::vector<Case>& cases, const fs::path& root, int threads) {
  SuiteRun out;
  fs::remove_all(root);
  fs::create_directories(root / "configs");
  for (const auto& c : cases) {
    std::vector<std::string> args{"shellhier"};
    args.insert(args.end(), c.command.begin(), c.command.end());
    if (!c.config.is_null()) {
      const fs::path cfg = root / "configs" / (c.name + ".json");
      std::ofstream(cfg) << c.config.dump(2) << "\n";
      args.insert(args.end(), {"--config", cfg.string()});
    }
    args.insert(args.end(), c.extra.begin(), c.extra.end());
    args.insert(args.end(), {"--out", (root / c.name).string(), "--threads", std::to_string(threads)});
    // classify echoes its verdict on stdout; keep the acceptance output to one line per criterion.
    std::ostringstream sink;
    std::streambuf* saved = std::cout.rdbuf(sink.rdbuf());
    out.exit_codes[c.name] = shellhier::cli::run(args);
    std::cout.rdbuf(saved);
    std::ifstream in(root / c.name / "report.json");
    out.reports[c.name] = in ? json::parse(in) : json();
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

double get(const json& j, const json::json_pointer& p) {
  if (!j.contains(p) || !j.at(p).is_number()) return NAN;
  return j.at(p).get<double>();
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const std::vector<Case> cases = build_cases();
  const SuiteRun run = run_suite(cases, root / "threads_1", 1);
  const auto& R = run.reports;
  auto ok = [&](const std::string& name) { return run.exit_codes.at(name) == 0; };
  using P = json::json_pointer;
  std::vector<std::pair<std::string, Verdict>> verdicts;

  {
    Verdict v;
    const json& r = R.at("a1_scaling")["results"];
    const double beta = get(r, P("/beta_hat"));
    v.require(ok("a1_scaling") && std::abs(beta - 2.0) <= 0.05, "beta_hat=" + fmt("%.5f", beta) + " in 2.00+-0.05");
    double worst = 0.0;
    bool have = ok("a1_equipartition");
    for (const auto& row : R.at("a1_equipartition")["results"]["rows"]) worst = std::max(worst, row["stretching"].get<double>());
    v.require(have && worst <= 1e-10, "max stretching=" + fmt("%.2e", worst) + " <= 1e-10");
    verdicts.emplace_back("A1", v);
  }
  {
    Verdict v;
    std::vector<std::string> selected;
    for (const auto& [name, label] :
         {std::pair{"a2_R1.5", "R=1.5"}, std::pair{"a1_scaling", "R=2"}, std::pair{"a2_R3", "R=3"}}) {
      const json& n = R.at(name)["results"]["normalization"];
      const std::string sel = n.is_object() && n["selected"].is_string() ? n["selected"].get<std::string>() : "none";
      selected.push_back(sel);
      v.require(ok(name) && sel != "none",
                std::string(label) + ": raw err " +
                    fmt("%.2e", get(n, P("/raw/relative_error"))) + ", scaled err " +
                    fmt("%.2e", get(n, P("/scaled/relative_error"))) + " -> " + sel);
    }
    const bool stable = std::all_of(selected.begin(), selected.end(), [&](const auto& s) { return s == selected[0]; });
    v.require(stable, "selected normalization '" + selected[0] + "' stable across R");
    verdicts.emplace_back("A2", v);
  }
  {
    Verdict v;
    const json& r = R.at("a3_vonkarman")["results"];
    const double beta = get(r, P("/beta_hat")), err = get(r, P("/limit/relative_error"));
    v.require(ok("a3_vonkarman") && std::abs(beta - 4.0) <= 0.05, "beta_hat=" + fmt("%.5f", beta) + " in 4.00+-0.05");
    v.require(ok("a3_vonkarman") && err <= 0.05,
              "limit " + fmt("%.6f", get(r, P("/limit/extrapolated"))) + " vs I4 " +
                  fmt("%.6f", get(r, P("/limit/target"))) + ", rel err " + fmt("%.2e", err) + " <= 5%");
    verdicts.emplace_back("A3", v);
  }
  {
    Verdict v;
    double q2 = 0.0, q3 = 0.0;
    bool all = true;
    for (int k = 0; k < 5; ++k) {
      const std::string name = "a4_material_" + std::to_string(k);
      all = all && ok(name);
      q2 = std::max(q2, get(R.at(name), P("/results/q2_mismatch")));
      q3 = std::max(q3, get(R.at(name), P("/results/q3_hessian")));
    }
    v.require(all && q2 <= 1e-10, "5 (mu, lambda) x 1000 inputs: max q2 gap " + fmt("%.2e", q2) + " <= 1e-10 (1+|q2|)");
    v.require(all && q3 <= 1e-6, "q3 vs FD Hessian rel err " + fmt("%.2e", q3) + " <= 1e-6");
    verdicts.emplace_back("A4", v);
  }
  {
    Verdict v;
    const json& r = R.at("a5_material")["results"];
    const double fi = get(r, P("/frame_indifference")), wr = get(r, P("/rotation_energy")),
                 nd = get(r, P("/nondegeneracy"));
    v.require(ok("a5_material") && fi <= 1e-12, "frame indifference " + fmt("%.2e", fi) + " <= 1e-12 (1e4 samples)");
    v.require(ok("a5_material") && wr <= 1e-14, "max W(R) " + fmt("%.2e", wr) + " <= 1e-14");
    v.require(ok("a5_material") && nd >= 0.1, "min W/dist^2 " + fmt("%.3f", nd) + " >= 0.1");
    verdicts.emplace_back("A5", v);
  }
  {
    Verdict v;
    const json& cap = R.at("a6_cap")["results"]["modes"];
    double rigid = 0.0;
    size_t count = 0;
    if (cap.is_object())
      for (const auto& q : cap["rigid_quotients"]) rigid = std::max(rigid, std::abs(q.get<double>())), ++count;
    const double first = get(cap, P("/quotients/0"));
    v.require(ok("a6_cap") && count == 6 && rigid <= 1e-12, "cap: 6 rigid quotients <= " + fmt("%.1e", rigid));
    v.require(ok("a6_cap") && first > 1e-12, "cap: first nonrigid quotient " + fmt("%.2e", first) + " > 1e-12");
    double worst = 0.0;
    size_t n = 0;
    for (const auto& q : R.at("a6_plate")["results"]["field_quotients"]) worst = std::max(worst, q.get<double>()), ++n;
    v.require(ok("a6_plate") && n == 20 && worst <= 1e-12,
              "plate: 20 random out-of-plane fields, max quotient " + fmt("%.2e", worst) + " <= 1e-12");
    verdicts.emplace_back("A6", v);
  }
  {
    Verdict v;
    const json& r = R.at("a7_matching")["results"];
    double defect = 0.0;
    size_t n = 0;
    if (r.contains("solutions"))
      for (const auto& s : r["solutions"]) defect = std::max(defect, s["defect"].get<double>()), ++n;
    v.require(ok("a7_matching") && n == 4 && defect <= 1e-10,
              "4 eps values converged, max defect " + fmt("%.2e", defect) + " <= 1e-10");
    std::string ratios;
    bool in_range = r.contains("sup_ratios") && r["sup_ratios"].size() == 3;
    if (r.contains("sup_ratios"))
      for (const auto& x : r["sup_ratios"]) {
        const double q = x.get<double>();
        in_range = in_range && q >= 0.5 && q <= 2.0;
        ratios += (ratios.empty() ? "" : ", ") + fmt("%.3f", q);
      }
    v.require(in_range, "sup|w| ratios [" + ratios + "] in [0.5, 2]");
    verdicts.emplace_back("A7", v);
  }
  {
    Verdict v;
    using shellhier::alpha_to_beta;
    using shellhier::order_for_scaling;
    const bool orders = order_for_scaling(4.0).order == 1 && order_for_scaling(3.0).order == 2 &&
                        order_for_scaling(8.0 / 3.0).order == 3 && order_for_scaling(2.5).order == 4;
    const bool betas = alpha_to_beta(1.0) == 1.0 && alpha_to_beta(2.0) == 2.0 && alpha_to_beta(3.0) == 4.0;
    v.require(orders, "N = 1, 2, 3, 4 at beta = 4, 3, 8/3, 5/2");
    v.require(betas, "(alpha, beta) = (1,1), (2,2), (3,4)");
    const int cli_orders[] = {1, 2, 3, 4};
    const char* names[] = {"a8_beta_4", "a8_beta_3", "a8_beta_2.6666666666666667", "a8_beta_2.5"};
    bool cli = true;
    for (int k = 0; k < 4; ++k)
      cli = cli && ok(names[k]) && R.at(names[k])["results"]["classification"]["N"] == cli_orders[k];
    cli = cli && R.at("a8_alpha_3")["results"]["beta"] == 4.0 && R.at("a8_alpha_1")["results"]["beta"] == 1.0 &&
          R.at("a8_alpha_2")["results"]["beta"] == 2.0;
    v.require(cli, "same through the classify subcommand");
    verdicts.emplace_back("A8", v);
  }
  {
    Verdict v;
    for (const auto& [name, order] : {std::pair{"a9_order1", 1}, std::pair{"a9_order2", 2}}) {
      const json& r = R.at(name)["results"]["isometry_order"];
      const int got = r.is_object() ? r["order"].get<int>() : -1;
      const double res = get(r, P("/fit_residual"));
      v.require(ok(name) && got == order && res <= 0.02,
                "order " + std::to_string(order) + ": got " + std::to_string(got) + ", fit residual " +
                    fmt("%.3f", res) + " <= 0.02");
    }
    verdicts.emplace_back("A9", v);
  }
  {
    Verdict v;
    const json& a = R.at("a10_u2")["results"]["plate_check"];
    const json& b = R.at("a10_u2v2")["results"]["plate_check"];
    const double da = get(a, P("/max_abs_det")), db = get(b, P("/max_abs_det"));
    v.require(ok("a10_u2") && a["in_V2"] == true && std::abs(da) <= 1e-8, "u^2: in V2, det " + fmt("%.1e", da));
    v.require(ok("a10_u2v2") && b["in_V2"] == false && std::abs(db - 4.0) <= 1e-8,
              "u^2+v^2: not in V2, det " + fmt("%.10f", db));
    verdicts.emplace_back("A10", v);
  }
  {
    // Rerun the full suite at a different parallelism level.
    Verdict v;
    const fs::path other = root / "threads_4";
    run_suite(cases, other, 4);
    size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& entry : fs::recursive_directory_iterator(root / "threads_1")) {
      const auto ext = entry.path().extension();
      if (!entry.is_regular_file() || (entry.path().filename() != "report.json" && ext != ".csv")) continue;
      const fs::path rel = fs::relative(entry.path(), root / "threads_1");
      ++compared;
      if (!fs::exists(other / rel) || slurp(entry.path()) != slurp(other / rel)) differing.push_back(rel.string());
    }
    v.require(compared > 0 && differing.empty(),
              std::to_string(compared) + " report/CSV files identical across threads 1 and 4" +
                  (differing.empty() ? "" : " (differs: " + differing.front() + ")"));
    verdicts.emplace_back("A11", v);
  }

  bool all = true;
  for (const auto& [id, v] : verdicts) {
    std::cout << id << (id.size() < 3 ? "  " : " ") << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "\n";
    all = all && v.pass;
  }
  std::cout << (all ? "all acceptance criteria passed" : "acceptance criteria FAILED") << "\n";
  return all ? 0 : 1;
}
