#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "simplex.hpp"
#include "taperplan/errors.hpp"
#include "taperplan/milp.hpp"

namespace taperplan::milp {

namespace {

constexpr double kIntTolDefault = 1e-6;

void require_valid(const SparseMilp& model) {
  std::vector<std::string> problems = model.validate();
  if (problems.empty()) return;
  std::string msg = "invalid model: " + problems.front();
  if (problems.size() > 1)
    msg += " (+" + std::to_string(problems.size() - 1) + " more)";
  throw std::invalid_argument(msg);
}

LpSolution to_lp_solution(const SimplexSolver::Result& r) {
  LpSolution out;
  out.status = r.status;
  out.values = r.x;
  out.row_duals = r.duals;
  out.objective = r.status == SolveStatus::Optimal ? r.objective : 0.0;
  if (r.status == SolveStatus::Unbounded)
    out.objective = -std::numeric_limits<double>::infinity();
  out.iterations = r.iterations;
  return out;
}

// One branch-and-bound node. Bounds along the path to the root are stored as
// single-variable tightenings and intersected on demand.
struct Node {
  int parent = -1;
  int var = -1;
  double lb = 0.0;
  double ub = 0.0;
  double bound = -std::numeric_limits<double>::infinity();
  int depth = 0;
  long id = 0;
};

void materialize_bounds(const std::vector<Node>& arena, int node,
                        const SparseMilp& model, std::vector<double>& lb,
                        std::vector<double>& ub) {
  lb = model.col_lower;
  ub = model.col_upper;
  for (int cur = node; cur >= 0; cur = arena[cur].parent) {
    const Node& nd = arena[cur];
    if (nd.var < 0) continue;  // root carries no tightening
    lb[nd.var] = std::max(lb[nd.var], nd.lb);
    ub[nd.var] = std::min(ub[nd.var], nd.ub);
  }
}

struct NodeResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

}  // namespace

LpSolution solve_lp(const SparseMilp& model) {
  require_valid(model);
  SimplexSolver solver(model);
  SimplexSolver::Result r =
      solver.solve(model.col_lower.data(), model.col_upper.data());
  return to_lp_solution(r);
}

MilpSolution solve_milp(const SparseMilp& model, const MilpOptions& opt) {
  require_valid(model);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  MilpSolution out;
  out.best_bound = -std::numeric_limits<double>::infinity();
  out.gap = std::numeric_limits<double>::infinity();

  std::vector<int> int_cols;
  for (int j = 0; j < model.n_cols(); ++j)
    if (model.integral[j]) int_cols.push_back(j);

  const double int_tol =
      opt.integrality_tol > 0 ? opt.integrality_tol : kIntTolDefault;
  const int workers = std::max(1, opt.threads);

  // One solver per worker; each reuses its factorization machinery across
  // nodes, which is where most of the speed comes from.
  std::vector<std::unique_ptr<SimplexSolver>> solvers;
  solvers.emplace_back(std::make_unique<SimplexSolver>(model));

  std::vector<Node> arena;
  arena.push_back(Node{});  // root
  std::vector<int> open = {0};

  bool have_inc = false;
  double inc_obj = std::numeric_limits<double>::infinity();
  std::vector<double> inc_x;
  long inc_node_id = -1;

  double global_bound = -std::numeric_limits<double>::infinity();
  long nodes = 0;
  long next_id = 1;
  bool hit_limit = false;
  bool root_unbounded = false;
  constexpr std::size_t kBestFirstAbove = 20000;
  constexpr long kBoundRefresh = 64;
  constexpr long kDiveEvery = 512;

  bool dive_pending = false;
  int dive_node = -1;
  int dives_run = 0;
  double dive_obj = 0.0;
  std::vector<double> dive_x;
  long last_dive_nodes = -kDiveEvery;  // so the first branching node dives

  std::vector<double> lb, ub;

  auto node_gap = [&](double bound) {
    if (!have_inc) return std::numeric_limits<double>::infinity();
    const double denom = std::max(std::fabs(inc_obj), 1e-10);
    return (inc_obj - bound) / denom;
  };

  auto recompute_bound = [&]() {
    double b = have_inc ? inc_obj : std::numeric_limits<double>::infinity();
    for (int idx : open) b = std::min(b, arena[idx].bound);
    global_bound = open.empty() && !have_inc
                       ? -std::numeric_limits<double>::infinity()
                       : b;
  };

  auto accept_incumbent = [&](double obj, std::vector<double>&& x, long id) {
    if (!have_inc || obj < inc_obj) {
      have_inc = true;
      inc_obj = obj;
      inc_x = std::move(x);
      inc_node_id = id;
    }
  };

  // LP-guided rounding search: freeze every integral column already sitting
  // on an integer (always safe — the current optimum stays feasible), round
  // the most fractional one, and recurse on both of its values with the
  // LP's own lean tried first.  Dead ends backtrack, completions feed the
  // incumbent, and the incumbent in turn prunes the rest of the search, so
  // a greedy path that walks into a corner gets repaired instead of
  // abandoned.  The LP budget caps the cost; one good incumbent from here
  // lets the main tree discard tied subtrees without solving them.
  auto try_dive = [&](const std::vector<double>& dlb0,
                      const std::vector<double>& dub0, double start_obj,
                      std::vector<double> start_x, int budget) {
    auto dfs = [&](auto&& self, const std::vector<double>& dlb,
                   const std::vector<double>& dub, double cur_obj,
                   std::vector<double> x) -> void {
      const double prune_tol = 1e-9 * (1.0 + std::fabs(inc_obj));
      if (have_inc && cur_obj >= inc_obj - prune_tol) return;
      std::vector<double> flb = dlb, fub = dub;
      int frac_var = -1;
      double frac_val = 0.0, best_score = int_tol;
      for (int j : int_cols) {
        const double v = x[j];
        const double f = v - std::floor(v);
        const double score = std::min(f, 1.0 - f);
        if (score <= int_tol) {
          flb[j] = fub[j] = std::round(v);  // freeze where it stands
        } else if (score > best_score) {
          best_score = score;
          frac_var = j;
          frac_val = v;
        }
      }
      if (frac_var < 0) {
        accept_incumbent(cur_obj, std::move(x), -2);  // heuristic origin
        return;
      }
      const double blo = flb[frac_var], bhi = fub[frac_var];
      double rounded = std::round(frac_val);
      rounded = std::min(bhi, std::max(blo, rounded));
      const double other = rounded > frac_val ? rounded - 1.0 : rounded + 1.0;
      const double sides[2] = {rounded, other};
      for (double side : sides) {
        if (side < blo || side > bhi) continue;
        if (budget <= 0) return;
        --budget;
        flb[frac_var] = fub[frac_var] = side;
        SimplexSolver::Result r = solvers[0]->solve(flb.data(), fub.data());
        if (r.status != SolveStatus::Optimal) continue;
        self(self, flb, fub, r.objective, std::move(r.x));
      }
    };
    dfs(dfs, dlb0, dub0, start_obj, std::move(start_x));
  };

  // Evaluate one node's relaxation with the given worker's solver.
  auto eval_node = [&](int node_idx, SimplexSolver& solver,
                       std::vector<double>& wlb,
                       std::vector<double>& wub) -> NodeResult {
    materialize_bounds(arena, node_idx, model, wlb, wub);
    SimplexSolver::Result r = solver.solve(wlb.data(), wub.data());
    NodeResult nr;
    nr.status = r.status;
    nr.objective = r.objective;
    if (r.status == SolveStatus::Optimal) nr.x = std::move(r.x);
    return nr;
  };

  // Process a solved node: prune, accept as incumbent, or branch.
  auto process = [&](int node_idx, NodeResult&& nr) {
    if (nr.status == SolveStatus::Unbounded) {
      if (node_idx == 0) root_unbounded = true;
      return;
    }
    if (nr.status != SolveStatus::Optimal) return;  // infeasible leaf
    const double prune_tol = 1e-9 * (1.0 + std::fabs(inc_obj));
    if (have_inc && nr.objective >= inc_obj - prune_tol) return;

    // most fractional integral variable
    int branch_var = -1;
    double branch_val = 0.0;
    double best_score = int_tol;
    for (int j : int_cols) {
      const double v = nr.x[j];
      const double f = v - std::floor(v);
      const double score = std::min(f, 1.0 - f);
      if (score > best_score) {
        best_score = score;
        branch_var = j;
        branch_val = v;
      }
    }
    if (branch_var < 0) {
      // integral within tolerance: new incumbent (first found wins ties)
      accept_incumbent(nr.objective, std::move(nr.x), arena[node_idx].id);
      return;
    }
    // Periodically hand a fractional relaxation to the dive so pruning has
    // an incumbent to work against long before branching finds one.
    if (!dive_pending && nodes - last_dive_nodes >= kDiveEvery) {
      dive_pending = true;
      dive_node = node_idx;
      dive_obj = nr.objective;
      dive_x = nr.x;
    }
    const double f = branch_val - std::floor(branch_val);
    Node down;
    down.parent = node_idx;
    down.var = branch_var;
    down.lb = -std::numeric_limits<double>::infinity();
    down.ub = std::floor(branch_val);
    down.bound = nr.objective;
    down.depth = arena[node_idx].depth + 1;
    Node up = down;
    up.lb = std::ceil(branch_val);
    up.ub = std::numeric_limits<double>::infinity();
    // push the far side first so the near side pops next (rounding ties
    // explore the floor side first)
    const bool up_first = f > 0.5;
    Node first = up_first ? down : up;
    Node second = up_first ? up : down;
    first.id = next_id++;
    second.id = next_id++;
    arena.push_back(first);
    open.push_back(static_cast<int>(arena.size()) - 1);
    arena.push_back(second);
    open.push_back(static_cast<int>(arena.size()) - 1);
  };

  while (!open.empty()) {
    if (nodes >= opt.node_limit || elapsed() > opt.time_limit_s) {
      hit_limit = true;
      break;
    }
    // DFS by default; fall back to best-first when the frontier balloons
    std::vector<int> batch;
    const std::size_t take = std::min<std::size_t>(
        static_cast<std::size_t>(workers), open.size());
    const double pop_tol = 1e-9 * (1.0 + std::fabs(inc_obj));
    while (batch.size() < take && !open.empty()) {
      std::size_t pick = open.size() - 1;
      if (open.size() > kBestFirstAbove) {
        for (std::size_t i = 0; i < open.size(); ++i)
          if (arena[open[i]].bound < arena[open[pick]].bound) pick = i;
      }
      const int idx = open[pick];
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      // the parent's relaxation already bounds this node; discard without
      // an LP solve when it cannot beat the incumbent
      if (have_inc && arena[idx].bound >= inc_obj - pop_tol) continue;
      batch.push_back(idx);
    }
    if (batch.empty()) continue;

    std::vector<NodeResult> results(batch.size());
    if (batch.size() == 1) {
      results[0] = eval_node(batch[0], *solvers[0], lb, ub);
    } else {
      while (solvers.size() < batch.size())
        solvers.emplace_back(std::make_unique<SimplexSolver>(model));
      std::vector<std::thread> pool;
      for (std::size_t t = 1; t < batch.size(); ++t) {
        pool.emplace_back([&, t]() {
          std::vector<double> tlb, tub;
          results[t] = eval_node(batch[t], *solvers[t], tlb, tub);
        });
      }
      results[0] = eval_node(batch[0], *solvers[0], lb, ub);
      for (std::thread& th : pool) th.join();
    }
    nodes += static_cast<long>(batch.size());
    // process in pop order so the search is deterministic for a fixed
    // worker count
    for (std::size_t t = 0; t < batch.size(); ++t)
      process(batch[t], std::move(results[t]));
    if (root_unbounded) break;

    if (dive_pending) {
      dive_pending = false;
      last_dive_nodes = nodes;
      materialize_bounds(arena, dive_node, model, lb, ub);
      // the first dive carries the incumbent hunt, so it gets a real
      // budget; later ones only patch up after the tree drifts
      try_dive(lb, ub, dive_obj, std::move(dive_x), dives_run == 0 ? 3000 : 300);
      ++dives_run;
    }

    if (nodes % kBoundRefresh < static_cast<long>(batch.size()))
      recompute_bound();
    if (have_inc && opt.gap_tol > 0) {
      recompute_bound();
      if (node_gap(global_bound) <= opt.gap_tol) break;
    }
  }

  out.nodes = nodes;
  out.wall_time_s = elapsed();
  if (root_unbounded) {
    out.status = SolveStatus::Unbounded;
    out.objective = -std::numeric_limits<double>::infinity();
    return out;
  }
  recompute_bound();
  if (have_inc) {
    out.values = inc_x;
    out.objective = inc_obj;
    if (open.empty() && !hit_limit) {
      out.status = SolveStatus::Optimal;
      out.best_bound = inc_obj;
      out.gap = 0.0;
    } else {
      out.status = SolveStatus::Feasible;
      out.best_bound = global_bound;
      out.gap = node_gap(global_bound);
      if (!hit_limit && out.gap <= opt.gap_tol) {
        // stopped because the incumbent is provably within tolerance
        out.status = SolveStatus::Optimal;
      }
    }
  } else if (hit_limit) {
    out.status = SolveStatus::Limit;
    out.best_bound = global_bound;
  } else {
    out.status = SolveStatus::Infeasible;
  }
  (void)inc_node_id;
  return out;
}

MilpSolution brute_force(const SparseMilp& model, int max_binaries) {
  require_valid(model);
  const int cap = std::min(max_binaries, 20);
  std::vector<int> bins;
  for (int j = 0; j < model.n_cols(); ++j) {
    if (!model.integral[j]) continue;
    if (model.col_upper[j] - model.col_lower[j] <= 0.5) continue;  // fixed
    if (std::fabs(model.col_lower[j]) > 1e-9 ||
        std::fabs(model.col_upper[j] - 1.0) > 1e-9)
      throw std::invalid_argument(
          "brute force handles binary variables only (column " +
          model.col_names[j] + " has bounds [" +
          std::to_string(model.col_lower[j]) + ", " +
          std::to_string(model.col_upper[j]) + "])");
    bins.push_back(j);
  }
  const int k = static_cast<int>(bins.size());
  if (k > cap)
    throw std::invalid_argument(
        "brute force refused: " + std::to_string(k) +
        " free binary variables exceed the limit of " + std::to_string(cap));

  // Per-row activity range of everything that is not a free binary; used to
  // discard assignments that cannot possibly be feasible before solving.
  const int m = model.n_rows();
  std::vector<double> act_min(m, 0.0), act_max(m, 0.0);
  std::vector<uint8_t> is_free_bin(model.n_cols(), 0);
  for (int j : bins) is_free_bin[j] = 1;
  for (int i = 0; i < m; ++i) {
    for (const RowEntry& e : model.rows[i].entries) {
      if (is_free_bin[e.col]) continue;
      const double lo = model.col_lower[e.col];
      const double hi = model.col_upper[e.col];
      const double a = e.value * lo;
      const double b = e.value * hi;
      act_min[i] += std::min(a, b);
      act_max[i] += std::max(a, b);
    }
  }
  // binary contribution per row, per enumerated variable
  std::vector<std::vector<double>> bin_coef(k, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (const RowEntry& e : model.rows[i].entries)
      for (int b = 0; b < k; ++b)
        if (bins[b] == e.col) bin_coef[b][i] += e.value;

  SimplexSolver solver(model);
  std::vector<double> lb = model.col_lower;
  std::vector<double> ub = model.col_upper;

  MilpSolution out;
  out.best_bound = -std::numeric_limits<double>::infinity();
  out.gap = std::numeric_limits<double>::infinity();
  bool have_best = false;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  bool unbounded = false;

  std::vector<double> amin(m), amax(m);
  const std::uint64_t masks = 1ull << k;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    amin = act_min;
    amax = act_max;
    for (int b = 0; b < k; ++b) {
      if (!(mask >> b & 1)) continue;
      for (int i = 0; i < m; ++i) {
        amin[i] += bin_coef[b][i];
        amax[i] += bin_coef[b][i];
      }
    }
    bool plausible = true;
    for (int i = 0; i < m && plausible; ++i) {
      if (amin[i] > model.rows[i].upper + 1e-9) plausible = false;
      if (amax[i] < model.rows[i].lower - 1e-9) plausible = false;
    }
    if (!plausible) continue;

    for (int b = 0; b < k; ++b) {
      const double v = mask >> b & 1 ? 1.0 : 0.0;
      lb[bins[b]] = v;
      ub[bins[b]] = v;
    }
    SimplexSolver::Result r = solver.solve(lb.data(), ub.data());
    for (int b = 0; b < k; ++b) {
      lb[bins[b]] = model.col_lower[bins[b]];
      ub[bins[b]] = model.col_upper[bins[b]];
    }
    if (r.status == SolveStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (r.status != SolveStatus::Optimal) continue;
    if (!have_best || r.objective < best_obj - 1e-12 * (1.0 + std::fabs(best_obj))) {
      have_best = true;
      best_obj = r.objective;
      best_x = std::move(r.x);
    }
  }

  out.nodes = static_cast<long>(masks);
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (unbounded) {
    out.status = SolveStatus::Unbounded;
    out.objective = -std::numeric_limits<double>::infinity();
  } else if (have_best) {
    out.status = SolveStatus::Optimal;
    out.values = best_x;
    out.objective = best_obj;
    out.best_bound = best_obj;
    out.gap = 0.0;
  } else {
    out.status = SolveStatus::Infeasible;
  }
  return out;
}

}  // namespace taperplan::milp
