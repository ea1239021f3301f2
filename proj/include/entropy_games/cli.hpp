#pragma once

// File-based command layer: input loaders, run manifests, atomic output and
// one function per subcommand. Each command returns the JSON printed on stdout.

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/lp.hpp"
#include "entropy_games/minentropy.hpp"
#include "entropy_games/randomness.hpp"
#include "entropy_games/rational.hpp"
#include "entropy_games/repeated_game.hpp"
#include "entropy_games/rng.hpp"
#include "entropy_games/separation.hpp"
#include "entropy_games/team_game.hpp"

namespace entropy_games::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kInvalid = 2, kCap = 3, kInternal = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Files and hashing.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InvariantViolation("SHA-256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

/// Writes to a temporary sibling, then renames over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write output file '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("write failed for '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot move output into place at '" + path + "'");
  }
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Manifest: enough to replay the run. Only the timestamps vary between runs.

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), started_(utc_now()) {}

  void input(const std::string& path, const std::string& bytes) {
    inputs_.push_back(Json{{"path", path}, {"sha256", sha256_hex(bytes)}});
  }
  void seed(std::uint64_t s) { seed_ = s; }

  Json json() const {
    Json j;
    j["command"] = command_;
    j["args"] = args_;
    j["inputs"] = inputs_.empty() ? Json::array() : Json(inputs_);
    j["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    j["rng"] = std::string(CounterRng::kName);
    j["version"] = kVersion;
    j["started_utc"] = started_;
    j["finished_utc"] = utc_now();
    return j;
  }

  /// Sidecar next to a CSV: the manifest plus the output's own digest.
  void write_sidecar(const std::string& out_path, const std::string& content) const {
    Json j = json();
    j["output"] = Json{{"path", out_path}, {"sha256", sha256_hex(content)}};
    write_atomic(out_path + ".manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string started_;
  std::vector<Json> inputs_;
  std::optional<std::uint64_t> seed_;
};

// ---------------------------------------------------------------------------
// Input parsing.

inline Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Integers, "p/q" or decimal strings, and JSON floats. A float goes through
/// its shortest round-trip decimal, so 0.5 and .1 parse as 1/2 and 1/10.
inline Rational parse_cell(const Json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return parse_rational(v.dump());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, d);
      return parse_rational(std::string(buf, res.ptr));
    }
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a number or a numeric string");
}

inline std::vector<RationalVector> parse_table(const Json& t, const std::string& name) {
  if (!t.is_array() || t.empty()) throw ValidationError("'" + name + "' must be a non-empty array of rows");
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t[i].is_array()) throw ValidationError("row " + std::to_string(i + 1) + " of '" + name + "' is not an array");
    RationalVector row;
    for (std::size_t j = 0; j < t[i].size(); ++j)
      row.push_back(parse_cell(t[i][j], "cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Loaded {
  std::string path, bytes;
  Json json;
};

inline Loaded load(const std::string& path, Manifest& m) {
  Loaded l{path, read_file(path), {}};
  m.input(path, l.bytes);
  l.json = parse_json(l.bytes, path);
  if (!l.json.is_object()) throw ValidationError("'" + path + "' must hold a JSON object");
  return l;
}

/// {"matrix": [[...], ...]}
inline PayoffMatrix load_game(const std::string& path, Manifest& m) {
  auto l = load(path, m);
  if (!l.json.contains("matrix")) throw ValidationError("'" + path + "' has no \"matrix\" key");
  return PayoffMatrix(parse_table(l.json["matrix"], "matrix"));
}

/// {"pxy": [[...], ...]}, rows x, columns y; must sum to exactly 1.
inline JointPmf load_source(const std::string& path, Manifest& m) {
  auto l = load(path, m);
  if (!l.json.contains("pxy")) throw ValidationError("'" + path + "' has no \"pxy\" key");
  auto rows = parse_table(l.json["pxy"], "pxy");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ValidationError("ragged pxy: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                            " entries, expected " + std::to_string(rows[0].size()));
    for (const auto& q : rows[i])
      if (q < 0) throw ValidationError("pxy row " + std::to_string(i + 1) + " has a negative entry");
  }
  return JointPmf::from_rationals(rows);
}

namespace detail {
inline void flatten_payoff(const Json& node, const std::vector<std::size_t>& players, std::size_t depth,
                           const std::string& where, std::vector<RationalVector>& out) {
  if (depth == players.size()) {
    if (!node.is_array() || node.empty()) throw ValidationError("payoff" + where + " must be a non-empty row over B");
    RationalVector row;
    for (std::size_t b = 0; b < node.size(); ++b)
      row.push_back(parse_cell(node[b], "payoff" + where + "[" + std::to_string(b) + "]"));
    out.push_back(std::move(row));
    return;
  }
  if (!node.is_array() || node.size() != players[depth])
    throw ValidationError("payoff" + where + " must have " + std::to_string(players[depth]) + " entries for player " +
                          std::to_string(depth + 1));
  for (std::size_t k = 0; k < node.size(); ++k)
    flatten_payoff(node[k], players, depth + 1, where + "[" + std::to_string(k) + "]", out);
}
}  // namespace detail

/// {"players": [2,2], "payoff": [a1][a2][b], "channel": [a_joint][s]}
inline TeamGameSpec load_team(const std::string& path, Manifest& m) {
  auto l = load(path, m);
  for (const char* key : {"players", "payoff", "channel"})
    if (!l.json.contains(key)) throw ValidationError("'" + path + "' has no \"" + std::string(key) + "\" key");
  const Json& p = l.json["players"];
  if (!p.is_array() || p.empty()) throw ValidationError("\"players\" must be a non-empty array of action counts");
  std::vector<std::size_t> players;
  for (const auto& k : p) {
    if (!k.is_number_integer() || k.get<long long>() < 1)
      throw ValidationError("\"players\" entries must be positive integers");
    players.push_back(k.get<std::size_t>());
  }
  std::vector<RationalVector> rows;
  detail::flatten_payoff(l.json["payoff"], players, 0, "", rows);
  std::vector<std::vector<double>> channel;
  for (const auto& row : parse_table(l.json["channel"], "channel")) {
    Rational total(0);
    for (const auto& q : row) total += q;
    if (total != 1) throw ValidationError("channel row " + std::to_string(channel.size() + 1) + " does not sum to 1");
    channel.push_back(to_doubles(row));
  }
  return TeamGameSpec(std::move(players), PayoffMatrix(std::move(rows)), std::move(channel));
}

// ---------------------------------------------------------------------------
// Output helpers.

inline Json rational_json(const RationalVector& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

inline std::string csv_path_with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  auto stem = p.stem().string();
  auto ext = p.extension().string();
  return (p.parent_path() / (stem + suffix + (ext.empty() ? ".csv" : ext))).string();
}

// ---------------------------------------------------------------------------
// Commands.

/// w*, a maximin strategy, v (with its row, 1-indexed), m_lo, m_hi.
inline Json cmd_value(const std::string& game_path, Manifest& m) {
  auto g = load_game(game_path, m);
  auto sol = game_value(g);
  Json j;
  j["w_star"] = to_string(sol.optimum);
  j["nash"] = rational_json(sol.argmax->probs());
  j["v"] = to_string(g.v());
  j["v_row"] = g.v_row() + 1;
  j["m_lo"] = to_string(g.m_lo());
  j["m_hi"] = to_string(g.m_hi());
  j["rows"] = g.rows();
  j["cols"] = g.cols();
  j["manifest"] = m.json();
  return j;
}

struct BoundsOptions {
  std::string game;
  std::optional<std::string> w_min, w_max;
  int steps = 21;
  std::string out;
};

/// Evenly spaced rational grid in [w_min, w_max], clamped to [v, w*].
inline Json cmd_bounds(const BoundsOptions& o, Manifest& m) {
  if (o.steps < 1) throw UsageError("--steps must be at least 1");
  auto g = load_game(o.game, m);
  const Rational wstar = game_value(g).optimum;
  Rational lo = o.w_min ? parse_rational(*o.w_min) : g.v();
  Rational hi = o.w_max ? parse_rational(*o.w_max) : wstar;
  const bool clamped = lo < g.v() || hi > wstar;
  lo = std::max(lo, g.v());
  hi = std::min(hi, wstar);
  if (lo > hi) throw ValidationError("empty w range after clamping to [v, w*] = [" + to_string(g.v()) + ", " +
                                     to_string(wstar) + "]");
  std::vector<Rational> grid;
  for (int k = 0; k < o.steps; ++k) {
    Rational w = o.steps == 1 ? lo : lo + (hi - lo) * frac(k, o.steps - 1);
    w.canonicalize();
    grid.push_back(w);
  }
  auto rep = bounds_report(g, grid);
  std::ostringstream csv;
  write_bounds_csv(csv, rep);
  write_atomic(o.out, csv.str());
  m.write_sidecar(o.out, csv.str());
  Json j;
  j["out"] = o.out;
  j["rows"] = rep.rows.size();
  j["w_min"] = to_string(lo);
  j["w_max"] = to_string(hi);
  j["clamped"] = clamped;
  j["v"] = to_string(rep.v);
  j["w_star"] = to_string(rep.wstar);
  j["m_lo"] = to_string(rep.m_lo);
  j["m_hi"] = to_string(rep.m_hi);
  j["h_star"] = rep.h_star;
  j["manifest"] = m.json();
  return j;
}

/// "myopic", "uniform" or "fixed:J" with J a 1-indexed column.
inline BobSpec parse_bob(const std::string& s) {
  if (s == "myopic") return {BobKind::myopic, 0};
  if (s == "uniform") return {BobKind::uniform, 0};
  if (s.rfind("fixed:", 0) == 0) {
    const std::string num = s.substr(6);
    std::size_t col = 0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), col);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || col < 1)
      throw UsageError("--bob fixed:J needs a column J >= 1");
    return {BobKind::fixed_column, col - 1};
  }
  throw UsageError("--bob must be myopic, uniform or fixed:J");
}

struct SimulateOptions {
  std::string game, source;
  int block_len = 10, blocks = 50;
  std::uint64_t seed = 0;
  std::string bob = "myopic";
  double eps = 0.05;
  std::optional<std::string> out;
};

/// Stage rows go to --out; block rows to the same name with "_blocks".
inline Json cmd_simulate(const SimulateOptions& o, Manifest& m) {
  RepeatedGameConfig cfg;
  cfg.game = load_game(o.game, m);
  cfg.source = load_source(o.source, m);
  cfg.L = o.block_len;
  cfg.N = o.blocks;
  cfg.seed = o.seed;
  cfg.bob = parse_bob(o.bob);
  cfg.eps = o.eps;
  m.seed(o.seed);
  auto tr = run_repeated_game(cfg);

  Json j;
  j["lambda_T"] = to_string(tr.lambda_T);
  j["lambda_T_float"] = tr.lambda_T.get_d();
  j["target"] = tr.theoretical_target;
  j["L"] = o.block_len;
  j["N"] = o.blocks;
  j["T"] = tr.stages.size();
  j["seed"] = o.seed;
  j["bob"] = o.bob;
  j["h_cond"] = tr.h_cond;
  j["target_rate"] = tr.target_rate;
  j["ell"] = tr.ell;
  j["alice"] = Json{{"p1", rational_json(tr.targets.p1.probs())},
                    {"p2", rational_json(tr.targets.p2.probs())},
                    {"gamma", tr.targets.gamma},
                    {"automatic", tr.targets.automatic}};
  j["extractor_tv"] = tr.extractor_tv;
  j["simulator_tv"] = tr.simulator_tv;
  j["block_tv"] = tr.block_tv;
  if (o.out) {
    std::ostringstream stages, blocks;
    stages << "t,x,y,a,b,payoff\r\n";
    for (const auto& s : tr.stages)
      stages << s.t + 1 << ',' << s.x + 1 << ',' << s.y + 1 << ',' << s.a + 1 << ',' << s.b + 1 << ','
             << to_string(s.payoff) << "\r\n";
    blocks << "block,tv,avg_payoff\r\n";
    for (const auto& b : tr.blocks)
      blocks << b.index + 1 << ',' << format_bits(b.tv_to_ideal) << ',' << to_string(b.avg_payoff) << "\r\n";
    const std::string blocks_path = csv_path_with_suffix(*o.out, "_blocks");
    write_atomic(*o.out, stages.str());
    write_atomic(blocks_path, blocks.str());
    m.write_sidecar(*o.out, stages.str());
    m.write_sidecar(blocks_path, blocks.str());
    j["out"] = *o.out;
    j["blocks_out"] = blocks_path;
  }
  j["manifest"] = m.json();
  return j;
}

struct TeamOptions {
  std::string team;
  int restarts = 8;
  std::size_t grid = 8;
  std::uint64_t seed = 0;
};

template <class T>
Json team_dist_json(const BasicTeamDistribution<T>& d) {
  auto cell = [](const T& x) -> Json {
    if constexpr (std::is_same_v<T, double>)
      return x;
    else
      return to_string(x);
  };
  auto row = [&](const std::vector<T>& r) {
    Json a = Json::array();
    for (const auto& x : r) a.push_back(cell(x));
    return a;
  };
  Json j;
  j["p_r"] = row(d.p_r);
  j["p_q_given_r"] = Json::array();
  for (const auto& r : d.p_q_given_r) j["p_q_given_r"].push_back(row(r));
  j["p_ai_given_q"] = Json::array();
  for (const auto& player : d.p_ai_given_q) {
    Json p = Json::array();
    for (const auto& r : player) p.push_back(row(r));
    j["p_ai_given_q"].push_back(p);
  }
  return j;
}

/// w_hat is the value of a feasible point, hence a lower bound on w.
inline Json cmd_team(const TeamOptions& o, Manifest& m) {
  if (o.restarts < 0) throw UsageError("--restarts must be nonnegative");
  if (o.grid < 1) throw UsageError("--grid must be at least 1");
  auto spec = load_team(o.team, m);
  m.seed(o.seed);
  auto r = team_maxmin_search(spec, o.restarts, o.grid, o.seed);
  Json j;
  j["w_hat"] = r.w_hat;
  j["w_hat_exact"] = r.w_hat_exact ? Json(to_string(*r.w_hat_exact)) : Json(nullptr);
  j["w_hat_is_lower_bound"] = true;
  j["slack"] = r.slack;
  j["feasible"] = r.slack >= -kTeamSlackTol;
  j["upper_bound"] = to_string(r.upper_bound);
  j["product_value"] = to_string(r.product_value);
  j["origin"] = r.origin;
  j["restarts"] = r.restarts_run;
  j["restarts_interior"] = r.restarts_interior;
  j["dist"] = r.best_exact ? team_dist_json(*r.best_exact) : team_dist_json(r.best);
  j["manifest"] = m.json();
  return j;
}

struct ExtractOptions {
  std::string source;
  int n = 1, bits = 1;
  double eps = 0.05;
  std::uint64_t seed = 0;
  int tries = 64;
};

inline Json cmd_extract(const ExtractOptions& o, Manifest& m) {
  auto j = load_source(o.source, m);
  m.seed(o.seed);
  auto e = build_extractor(j, o.n, o.bits, o.seed, o.tries, o.eps);
  Json out;
  out["spec"] = Json{{"family", to_string(e.family)}, {"seed", e.seed}, {"try_index", e.try_index},
                     {"n", e.n},                     {"bits", e.ell},  {"nx", j.nx()}};
  if (e.family == HashFamily::linear_gf2) {
    Json rows = Json::array();
    for (auto mask : e.matrix) {
      std::string bitsrow;
      const int width = e.n * static_cast<int>(std::log2(static_cast<double>(j.nx())) + 0.5);
      for (int k = width - 1; k >= 0; --k) bitsrow.push_back((mask >> k) & 1 ? '1' : '0');
      rows.push_back(bitsrow);
    }
    out["spec"]["matrix"] = rows;
  }
  out["eps"] = o.eps;
  out["measured_tv"] = e.measured_tv;
  out["certified_bound"] = e.certified_bound;
  out["certified"] = e.certified;
  out["h2_cond"] = collision_entropy_cond(j);
  out["note"] = e.note;
  out["manifest"] = m.json();
  return out;
}

struct SeparateOptions {
  std::string game, w1, w2;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};

inline Json cmd_separate(const SeparateOptions& o, Manifest& m) {
  auto g = load_game(o.game, m);
  m.seed(o.seed);
  const Rational w1 = parse_rational(o.w1), w2 = parse_rational(o.w2);
  auto r = sample_check_separation(g, w1, w2, o.samples, o.seed);
  Json j;
  j["w1"] = to_string(r.w1);
  j["w2"] = to_string(r.w2);
  j["bound_d1"] = r.bound_d1;
  j["bound_d2"] = r.bound_d2;
  j["min_d1"] = r.min_observed_d1;
  j["min_d2"] = r.min_observed_d2;
  j["samples"] = r.n_samples;
  j["vertex_pairs"] = r.vertex_pairs;
  j["violations"] = r.violations;
  j["partial"] = r.partial;
  j["q_fallbacks"] = r.q_fallbacks;
  j["diagnostic"] = r.diagnostic;
  j["manifest"] = m.json();
  return j;
}

/// Maps an exception from a command to its exit code and message.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  if (dynamic_cast<const CapExceeded*>(&e)) return kCap;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const EntropyDeficit*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e))
    return kInvalid;
  return kInternal;
}

}  // namespace entropy_games::cli
