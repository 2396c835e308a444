// roe_lab: batch front end for the roelab library.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roelab/roelab.hpp"

namespace {

using namespace roelab;
using io::Json;

enum Exit { kPass = 0, kUsage = 1, kNotInHull = 2, kInvalid = 3, kUncertified = 4, kViolation = 5 };

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  std::string out;
  std::string format = "json";
};

struct Input {
  std::string text;
  Json json;
  std::string hash;
};

Input load(const std::string& path, const char* what) {
  Input in;
  try {
    in.text = io::read_file(path);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
  in.json = io::parse(in.text, what);
  in.hash = io::hex64(io::fnv1a(in.text));
  return in;
}

void emit(const Global& g, const std::string& content) {
  if (g.out.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
  } else {
    io::write_atomic(g.out, content);
  }
}

void emit_json(const Global& g, const Json& j) { emit(g, io::dump(j)); }

void require_json(const Global& g, const char* cmd) {
  if (g.format != "json") throw Usage(std::string(cmd) + ": csv output is only available for flat tables");
}

std::uint64_t require_seed(const Global& g, const std::string& kind) {
  if (!g.seed) throw Usage("generate --kind " + kind + " is randomized and needs --seed");
  return *g.seed;
}

Json report(const char* command, Json inputs, Json parameters, Json result) {
  Json j;
  j["command"] = command;
  j["inputs"] = std::move(inputs);
  j["parameters"] = std::move(parameters);
  j["result"] = std::move(result);
  return j;
}

template <class T>
std::vector<T> split_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw Usage(std::string("cannot parse ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Usage(std::string(what) + " is empty");
  return out;
}

// z12 or z4xz5.
std::vector<std::size_t> parse_group(const std::string& g) {
  std::vector<std::size_t> orders;
  std::stringstream ss(g);
  std::string factor;
  while (std::getline(ss, factor, 'x')) {
    if (factor.size() < 2 || (factor[0] != 'z' && factor[0] != 'Z')) throw Usage("group factor '" + factor + "' is not zN");
    try {
      orders.push_back(std::stoul(factor.substr(1)));
    } catch (const std::exception&) {
      throw Usage("group factor '" + factor + "' is not zN");
    }
  }
  if (orders.empty()) throw Usage("empty --group");
  return orders;
}

// "1,3" for a cyclic group; "1:0,0:1" for products.
std::vector<std::vector<long long>> parse_gens(const std::string& s, std::size_t rank) {
  std::vector<std::vector<long long>> gens;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::vector<long long> g;
    std::stringstream gs(item);
    std::string c;
    while (std::getline(gs, c, ':')) {
      try {
        g.push_back(std::stoll(c));
      } catch (const std::exception&) {
        throw Usage("cannot parse generator '" + item + "'");
      }
    }
    if (g.size() != rank) throw Usage("generator '" + item + "' does not match the group rank");
    gens.push_back(std::move(g));
  }
  if (gens.empty()) throw Usage("empty --gens");
  return gens;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::size_t n = 0, rows = 0, cols = 0, d = 1;
  std::string group, gens;
  double p = 0.1, h_norm = 0.05, band = 1, radius = 2;
  std::size_t center = 0, atoms = 0, m = 0;
  std::string norm = "l2";
  bool strict = false;
};

MetricSpace base_space(const GenerateArgs& a, const Global& g) {
  if (a.kind == "path") return generate::path(a.n);
  if (a.kind == "cycle") return generate::cycle(a.n);
  if (a.kind == "grid") return generate::grid(a.rows, a.cols);
  if (a.kind == "cayley") {
    if (a.group.empty() || a.gens.empty()) throw Usage("cayley needs --group and --gens");
    const auto orders = parse_group(a.group);
    return generate::cayley(orders, parse_gens(a.gens, orders.size()));
  }
  if (a.kind == "random_graph") {
    return generate::random_graph(a.n, a.p, require_seed(g, a.kind),
                                  a.strict ? generate::DisconnectedPolicy::error : generate::DisconnectedPolicy::regenerate);
  }
  throw Usage("unknown space kind '" + a.kind + "'");
}

int cmd_generate(const GenerateArgs& a, const Global& g) {
  require_json(g, "generate");
  if (a.kind == "measure") {
    random::Rng rng(require_seed(g, a.kind));
    NormKind k;
    try {
      k = parse_norm_kind(a.norm);
    } catch (const DomainError& e) {
      throw Usage(e.what());
    }
    emit_json(g, io::to_json(random::gaussian_measure(a.m, a.atoms, k, rng)));
    return kPass;
  }
  if (a.kind == "permutation" || a.kind == "unitary") {
    // cycle(n) relabeled by a random bijection, optionally perturbed by exp(iH)
    random::Rng rng(require_seed(g, a.kind));
    const auto X = share(generate::cycle(a.n));
    const auto perm = random::permutation(a.n, rng);
    const auto Y = share(generate::relabeled(*X, perm, "cycle" + std::to_string(a.n) + "_relabeled"));
    const CoarseMap f(X, Y, perm);
    if (a.kind == "permutation") {
      emit_json(g, io::to_json(SpatialUnitary::from_bijection(f, a.d)));
    } else {
      emit_json(g, io::to_json(random::perturbed_bijection(f, a.d, a.band, a.h_norm, rng)));
    }
    return kPass;
  }
  if (a.kind == "expih") {
    // exp(iH) on cycle(n); its coordinate family is the lemma's standard input
    random::Rng rng(require_seed(g, a.kind));
    const auto X = share(generate::cycle(a.n));
    const auto h = random::banded_hermitian(X, a.d, a.band, a.h_norm, rng);
    emit_json(g, io::to_json(SpatialUnitary(X, X, a.d, random::exp_i(h.matrix()))));
    return kPass;
  }
  if (a.kind == "projection") {
    // exp(iH) chi_B exp(-iH) with B = B(center, radius) on cycle(n)
    random::Rng rng(require_seed(g, a.kind));
    const auto X = share(generate::cycle(a.n));
    const auto h = random::banded_hermitian(X, a.d, a.band, a.h_norm, rng);
    const Matrix u = random::exp_i(h.matrix());
    const auto chi = BandedOperator::indicator(X, ball(*X, Point(a.center), a.radius), a.d);
    const BandedOperator p(X, a.d, u * chi.matrix() * u.adjoint());
    emit_json(g, Json{{"space", io::to_json(*X)}, {"projection", io::to_json(p)}});
    return kPass;
  }
  emit_json(g, io::to_json(base_space(a, g)));
  return kPass;
}

// ---------------------------------------------------------------------------

struct RoundArgs {
  std::string measure, target_file, target;
  bool half = false, oracle = false;
  std::size_t bits = 20;
};

int cmd_round(const RoundArgs& a, const Global& g) {
  require_json(g, "round");
  const Input min = load(a.measure, "measure");
  const AtomicVectorMeasure mu = io::measure_from_json(min.json);
  Json inputs{{"measure_fnv1a", min.hash}};
  Json params{{"mode", a.half ? "halving" : "target"}, {"max_enumeration_bits", a.bits}};
  RoundingOptions opt;
  opt.max_enumeration_bits = a.bits;

  Eigen::VectorXd v;
  if (a.half) {
    v = 0.5 * mu.total();
  } else if (!a.target_file.empty()) {
    const Input tin = load(a.target_file, "target");
    v = io::vector_from_json(tin.json);
    inputs["target_fnv1a"] = tin.hash;
  } else if (!a.target.empty()) {
    const auto t = split_list<double>(a.target, "--target");
    v = Eigen::Map<const Eigen::VectorXd>(t.data(), Eigen::Index(t.size()));
    params["target"] = t;
  } else {
    throw Usage("round needs --target, --target-file or --half");
  }
  if (std::size_t(v.size()) != mu.dim()) throw InvalidInput("target has " + std::to_string(v.size()) + " entries, measure has m = " + std::to_string(mu.dim()));

  Json result;
  int code = kPass;
  try {
    const RoundingResult r = a.half ? approximate_halving(mu, IndexSet::full(mu.atom_count()), opt) : round_to_subset(mu, v, opt);
    result = io::to_json(r);
  } catch (const NotInHull& e) {
    result = Json{{"not_in_hull", true}, {"hull", io::to_json(e.witness())}};
    code = kNotInHull;
  }
  if (a.oracle) {
    if (mu.atom_count() > 22) throw Usage("--oracle needs at most 22 atoms");
    const OracleResult o = brute_force_oracle(mu, v);
    result["oracle"] = Json{{"subset", io::to_json(o.subset)}, {"error", o.error}};
  }
  emit_json(g, report("round", std::move(inputs), std::move(params), std::move(result)));
  return code;
}

// ---------------------------------------------------------------------------

struct RigidityArgs {
  std::string unitary;
  double min_floor = 1e-6;
  std::optional<double> max_closeness;
  bool stable = false;
  std::string xi;
};

int cmd_rigidity(const RigidityArgs& a, const Global& g) {
  const Input in = load(a.unitary, "unitary");
  const SpatialUnitary u = io::unitary_from_json(in.json);
  RigidityThresholds th;
  th.min_floor = a.min_floor;
  if (a.max_closeness) th.max_closeness = *a.max_closeness;
  Json params{{"min_floor", th.min_floor}, {"stable", a.stable}};
  if (a.max_closeness) params["max_closeness"] = *a.max_closeness;

  std::optional<Vector> xi;
  if (a.stable) {
    xi = Vector::Zero(Eigen::Index(u.fiber_dim()));
    if (a.xi.empty()) {
      (*xi)(0) = 1.0;
    } else {
      const auto v = split_list<double>(a.xi, "--xi");
      if (v.size() != u.fiber_dim()) throw InvalidInput("--xi must have d entries");
      for (std::size_t i = 0; i < v.size(); ++i) (*xi)(Eigen::Index(i)) = v[i];
      params["xi"] = v;
    }
  }
  const CoarseMapReport rep = xi ? stable_extract_map(u, *xi, th) : extract_map(u, th);
  if (g.format == "csv") {
    emit(g, io::expansion_csv(rep.expansion_table));
  } else {
    emit_json(g, report("rigidity", Json{{"unitary_fnv1a", in.hash}}, std::move(params), io::to_json(rep)));
  }
  switch (rep.verdict) {
    case Verdict::pass: return kPass;
    case Verdict::unverified_hypotheses: return kUncertified;
    case Verdict::fail: return kViolation;
  }
  return kViolation;
}

// ---------------------------------------------------------------------------

struct LemmaArgs {
  std::string unitary;
  double epsilon = 0.2;
  std::optional<double> r, delta;
  bool no_halving = false, floor = false;
};

int cmd_lemma(const LemmaArgs& a, const Global& g) {
  const Input in = load(a.unitary, "unitary");
  const SpatialUnitary u = io::unitary_from_json(in.json);
  const auto ps = random::conjugated_coordinates(u.target_ptr(), u.fiber_dim(), u.matrix());
  double r = 0;
  if (a.r) {
    r = *a.r;
  } else {
    const auto c = certify_radius(ps, a.epsilon);
    if (!c) throw UncertifiedHypothesis("family_tail_bound", family_tail_bound(ps, u.target().diameter()), a.epsilon);
    r = *c;
  }
  LemmaOptions opt;
  opt.delta = a.delta;
  opt.exercise_halving = !a.no_halving;
  Json params{{"epsilon", a.epsilon}, {"r", r}, {"exercise_halving", opt.exercise_halving}};
  if (a.delta) params["delta"] = *a.delta;

  const LemmaReport rep = check_halving_lemma(ps, a.epsilon, r, opt);
  Json result = io::to_json(rep);
  if (a.floor) result["floor"] = io::to_json(coefficient_floor_bound(ps, r));

  if (g.format == "csv") {
    std::string csv = "x,norm,complement_norm,large_count,halving_error,halving_limit\n";
    for (const auto& p : rep.points) {
      csv += std::to_string(p.x) + ",";
      io::detail::format_double(csv, p.norm);
      csv += ",";
      io::detail::format_double(csv, p.complement_norm);
      csv += "," + std::to_string(p.large.size()) + ",";
      io::detail::format_double(csv, p.halving_error);
      csv += ",";
      io::detail::format_double(csv, p.halving_limit);
      csv += "\n";
    }
    emit(g, csv);
  } else {
    emit_json(g, report("lemma", Json{{"unitary_fnv1a", in.hash}}, std::move(params), std::move(result)));
  }
  bool ok = rep.pass;
  if (a.floor) {
    const FloorBound fb = coefficient_floor_bound(ps, r);
    ok = ok && fb.measured >= fb.certified - kConclusionSlack;
  }
  return ok ? kPass : kViolation;
}

// ---------------------------------------------------------------------------

struct LocalizeArgs {
  std::string instance;
  std::size_t x = 0;
  double s = 2, epsilon = 0.2;
  std::optional<double> delta;
};

int cmd_localize(const LocalizeArgs& a, const Global& g) {
  require_json(g, "localize");
  const Input in = load(a.instance, "instance");
  if (!in.json.is_object() || !in.json.contains("space") || !in.json.contains("projection")) {
    throw InvalidInput("instance needs 'space' and 'projection'");
  }
  const SpacePtr X = share(io::space_from_json(in.json.at("space")));
  const BandedOperator p = io::operator_from_json(in.json.at("projection"), X);
  const BandedOperator approx =
      in.json.contains("approximant") ? io::operator_from_json(in.json.at("approximant"), X) : truncate(p, a.s);
  if (a.x >= X->size()) throw InvalidInput("--x is not a point of the space");
  const Vector zeta = point_vector(X->size(), p.fiber_dim(), Point(a.x));

  OpNormOptions nopt;
  nopt.tol = g.tol;
  const double gap = op_norm(p - approx, nopt);
  const double prop = propagation(approx);
  const double level = p.apply(zeta).norm();
  const double delta = a.delta ? *a.delta : std::min(1.0, level);
  if (!(delta > 0)) throw UncertifiedHypothesis("witness_level", level, 0.0);
  const LocalizationParams params = derive_params(a.epsilon, delta, std::max(a.s, prop), 0);

  Json pj = io::to_json(params);
  pj["x"] = a.x;
  pj["tol"] = g.tol;
  Json measured{{"approximation", gap}, {"propagation", prop}, {"witness_level", level}};

  if (!(gap <= params.gamma)) throw UncertifiedHypothesis("approximation", gap, params.gamma);
  if (!(level >= params.delta)) throw UncertifiedHypothesis("witness_level", level, params.delta);

  const LocalizationResult r = localize(p, approx, zeta, params);
  Json result = io::to_json(r);
  result["preconditions"] = std::move(measured);
  result["guarantees_hold"] = r.guarantees_hold(params);
  emit_json(g, report("localize", Json{{"instance_fnv1a", in.hash}}, std::move(pj), std::move(result)));
  return r.guarantees_hold(params) ? kPass : kViolation;
}

// ---------------------------------------------------------------------------

struct GhostArgs {
  std::string unitary, op;
  std::size_t center = 0;
  double threshold = 1e-6;
};

int cmd_ghost(const GhostArgs& a, const Global& g) {
  const Input in = load(a.unitary, "unitary");
  const SpatialUnitary u = io::unitary_from_json(in.json);
  Json inputs{{"unitary_fnv1a", in.hash}};
  if (a.center >= u.source().size()) throw InvalidInput("--center is not a point of the source space");
  BandedOperator op = BandedOperator::identity(u.source_ptr(), u.fiber_dim());
  if (!a.op.empty()) {
    const Input oin = load(a.op, "operator");
    op = io::operator_from_json(oin.json, u.source_ptr());
    if (op.fiber_dim() != u.fiber_dim()) throw InvalidInput("operator fiber dimension does not match the unitary");
    inputs["operator_fnv1a"] = oin.hash;
  }
  const CoarseMapReport maps = extract_map(u);
  const Point image_center = maps.f.assignment()[a.center];
  const auto rep = ghost_transport_experiment(u, op, ball_exhaustion(u.source(), Point(a.center)),
                                              ball_exhaustion(u.target(), image_center), a.threshold);
  if (g.format == "csv") {
    std::string csv = "stage,source,image\n";
    const std::size_t n = std::max(rep.source_profile.size(), rep.image_profile.size());
    for (std::size_t k = 0; k < n; ++k) {
      csv += std::to_string(k) + ",";
      if (k < rep.source_profile.size()) io::detail::format_double(csv, rep.source_profile[k]);
      csv += ",";
      if (k < rep.image_profile.size()) io::detail::format_double(csv, rep.image_profile[k]);
      csv += "\n";
    }
    emit(g, csv);
  } else {
    Json result = io::to_json(rep);
    result["image_center"] = image_center;
    emit_json(g, report("ghost", std::move(inputs), Json{{"center", a.center}, {"threshold", a.threshold}}, std::move(result)));
  }
  return rep.prediction_consistent ? kPass : kViolation;
}

void error_json(const Global& g, const std::string& kind, const std::string& message, const Json& extra = Json::object()) {
  Json j{{"error", kind}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  emit(g, io::dump(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roe_lab: coarse geometry and Roe-algebra experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "seed for randomized commands");
  app.add_option("--tol", g.tol, "relative tolerance for operator norms")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "write a space, measure, unitary or projection");
  gen->add_option("--kind", ga.kind,
                  "path, cycle, grid, cayley, random_graph, measure, permutation, unitary, expih, projection")
      ->required();
  gen->add_option("--n", ga.n, "number of points");
  gen->add_option("--rows", ga.rows);
  gen->add_option("--cols", ga.cols);
  gen->add_option("--group", ga.group, "z12 or z4xz5");
  gen->add_option("--gens", ga.gens, "1,3 or 1:0,0:1");
  gen->add_option("--p", ga.p, "edge probability");
  gen->add_flag("--strict", ga.strict, "fail instead of resampling a disconnected graph");
  gen->add_option("--d", ga.d, "fiber dimension");
  gen->add_option("--h-norm", ga.h_norm, "norm of the Hermitian perturbation");
  gen->add_option("--band", ga.band, "propagation of the Hermitian perturbation");
  gen->add_option("--center", ga.center);
  gen->add_option("--radius", ga.radius);
  gen->add_option("--m", ga.m, "measure dimension");
  gen->add_option("--atoms", ga.atoms, "number of atoms");
  gen->add_option("--norm", ga.norm, "l1, l2 or linf");

  RoundArgs ra;
  auto* rnd = app.add_subcommand("round", "round a hull point to a subset sum");
  rnd->add_option("--measure", ra.measure)->required();
  rnd->add_option("--target", ra.target, "comma separated target vector");
  rnd->add_option("--target-file", ra.target_file, "JSON array target vector");
  rnd->add_flag("--half", ra.half, "approximate halving of the whole measure");
  rnd->add_flag("--oracle", ra.oracle, "embed the brute-force optimum");
  rnd->add_option("--max-enumeration-bits", ra.bits);

  RigidityArgs ria;
  auto* rig = app.add_subcommand("rigidity", "extract coarse maps from a spatial unitary");
  rig->add_option("--unitary", ria.unitary)->required();
  rig->add_option("--min-floor", ria.min_floor);
  rig->add_option("--max-closeness", ria.max_closeness);
  rig->add_flag("--stable", ria.stable, "fiber-vector extraction for d >= 2");
  rig->add_option("--xi", ria.xi, "fiber vector, comma separated");

  LemmaArgs la;
  auto* lem = app.add_subcommand("lemma", "check the 1 - 4 epsilon bound on a conjugated coordinate family");
  lem->add_option("--unitary", la.unitary)->required();
  lem->add_option("--epsilon", la.epsilon);
  lem->add_option("--r", la.r, "approximation radius (default: smallest certified)");
  lem->add_option("--delta", la.delta);
  lem->add_flag("--no-halving", la.no_halving);
  lem->add_flag("--floor", la.floor, "also check the coefficient floor");

  LocalizeArgs loa;
  auto* loc = app.add_subcommand("localize", "localize a projection near a point");
  loc->add_option("--instance", loa.instance, "JSON with space, projection and optional approximant")->required();
  loc->add_option("--x", loa.x);
  loc->add_option("--s", loa.s, "truncation radius of the approximant");
  loc->add_option("--epsilon", loa.epsilon);
  loc->add_option("--delta", loa.delta);

  GhostArgs gha;
  auto* gho = app.add_subcommand("ghost", "ghost profiles of an operator and its conjugate");
  gho->add_option("--unitary", gha.unitary)->required();
  gho->add_option("--operator", gha.op, "operator on the source space (default identity)");
  gho->add_option("--center", gha.center);
  gho->add_option("--threshold", gha.threshold);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_generate(ga, g);
    if (*rnd) return cmd_round(ra, g);
    if (*rig) return cmd_rigidity(ria, g);
    if (*lem) return cmd_lemma(la, g);
    if (*loc) return cmd_localize(loa, g);
    if (*gho) return cmd_ghost(gha, g);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UncertifiedHypothesis& e) {
    error_json(g, "uncertified", e.what(), Json{{"bound", e.bound_name()}, {"value", e.value()}, {"limit", e.limit()}});
    return kUncertified;
  } catch (const NumericError& e) {
    error_json(g, "uncertified", e.what(), Json{{"bound", "op_norm_convergence"}});
    return kUncertified;
  } catch (const ConclusionViolation& e) {
    error_json(g, "conclusion_violation", e.what());
    return kViolation;
  } catch (const InvariantViolation& e) {
    error_json(g, "conclusion_violation", e.what());
    return kViolation;
  } catch (const InvalidInput& e) {
    error_json(g, "invalid_input", e.what());
    return kInvalid;
  } catch (const DomainError& e) {
    error_json(g, "invalid_input", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    error_json(g, "invalid_input", e.what());
    return kInvalid;
  }
  return kUsage;
}
