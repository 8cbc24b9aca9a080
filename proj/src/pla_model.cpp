#include "railvolt/pla_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace railvolt {

PlaGrid build_pla_grid(int n, int m, double t_max, double r0) {
  if (n < 2 || m < 2) throw DomainError("PLA grid needs n, m >= 2");
  if (!(t_max > 0)) throw DomainError("t_max must be positive");
  if (!(r0 > 0 && r0 < 1)) throw DomainError("r0 must lie in (0,1)");
  PlaGrid g;
  g.n = n;
  g.m = m;
  g.t_max = t_max;
  g.r0 = r0;
  for (int u = 0; u <= n; ++u) g.s.push_back(static_cast<double>(u) / n);
  for (int v = 0; v <= m; ++v) g.t.push_back(t_max * v / m);
  g.g.assign(n + 1, std::vector<double>(m + 1));
  for (int u = 0; u <= n; ++u)
    for (int v = 0; v <= m; ++v) g.g[u][v] = (1.0 - g.s[u]) * std::pow(1.0 - r0, g.t[v]);
  g.w.assign(n, std::vector<double>(m));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < m; ++v)
      g.w[u][v] = std::min(g.g[u][v + 1] - g.g[u][v], g.g[u + 1][v + 1] - g.g[u + 1][v]);
  return g;
}

namespace {

int cell_of(const std::vector<double>& bp, double x) {
  int cells = static_cast<int>(bp.size()) - 1;
  auto it = std::upper_bound(bp.begin(), bp.end(), x);
  int c = static_cast<int>(it - bp.begin()) - 1;
  return std::clamp(c, 0, cells - 1);
}

}  // namespace

double PlaGrid::approx(double soc, double hours) const {
  int u = cell_of(s, soc);
  int v = cell_of(t, hours);
  double lam = (soc - s[u]) / (s[u + 1] - s[u]);
  double eta = (hours - t[v]) / dt(v);
  return (1 - lam) * g[u][v] + lam * g[u + 1][v] + eta * w[u][v];
}

double pla_surface_error(const PlaGrid& grid, int samples) {
  double worst = 0.0;
  for (int u = 0; u < grid.n; ++u)
    for (int v = 0; v < grid.m; ++v)
      for (int a = 0; a <= samples; ++a)
        for (int b = 0; b <= samples; ++b) {
          double soc = grid.s[u] + (grid.s[u + 1] - grid.s[u]) * a / samples;
          double hrs = grid.t[v] + grid.dt(v) * b / samples;
          double exact = (1 - soc) * std::pow(1 - grid.r0, hrs);
          double lam = (soc - grid.s[u]) / (grid.s[u + 1] - grid.s[u]);
          double eta = (hrs - grid.t[v]) / grid.dt(v);
          double f = (1 - lam) * grid.g[u][v] + lam * grid.g[u + 1][v] + eta * grid.w[u][v];
          worst = std::max(worst, std::abs(f - exact));
        }
  return worst;
}

PlaModel build_model(const Instance& inst, const SolveConfig& cfg) {
  cfg.validate();
  if (auto v = validate_instance(inst); !v.empty())
    throw DomainError("invalid instance: " + v.front().message);

  PlaModel out;
  out.grid = build_pla_grid(cfg.soc_breakpoints, cfg.time_breakpoints, cfg.max_charge_hours,
                            inst.r0);
  const auto& grid = out.grid;
  auto& mdl = out.model;
  auto& ix = out.index;
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  const int kmax = inst.max_consists();
  const int n = grid.n, m = grid.m;
  const double M = cfg.big_M;
  const double Ms = cfg.soc_big_M;
  auto K = [&](int j) { return inst.trains[j].consists; };

  auto col = [&](std::string name, const char* sym, ColumnKind kind, double lo, double up,
                 double cost = 0.0) {
    ix.symbol.push_back(sym);
    return mdl.add_column(std::move(name), kind, lo, up, cost);
  };
  auto row = [&](std::string name, std::vector<Term> terms, Sense s, double rhs) {
    ix.row_family.push_back(name.substr(0, name.find('_')));
    return mdl.add_row(std::move(name), std::move(terms), s, rhs);
  };

  // Columns.
  ix.X.assign(ni, -1);
  for (int i = 0; i < ni; ++i)
    if (inst.is_interior(i))
      ix.X[i] = col(fmt::format("X_{}", i), "X", ColumnKind::binary, 0, 1,
                    cfg.alpha_fixed * inst.fixed_cost[i]);
  ix.Y.assign(nj, std::vector<int>(kmax, -1));
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < K(j); ++k)
      ix.Y[j][k] = col(fmt::format("Y_{}_{}", j, k), "Y", ColumnKind::binary, 0, 1);

  auto grid_ijk = [&] { return make_grid3<int>(ni, nj, kmax, -1); };
  ix.Zc = grid_ijk();
  ix.Zs = grid_ijk();
  ix.B = grid_ijk();
  ix.Sarr = grid_ijk();
  ix.Sdep = grid_ijk();
  ix.Tc = grid_ijk();
  ix.F = grid_ijk();
  auto vec4 = [&] {
    return std::vector<std::vector<std::vector<std::vector<int>>>>(
        ni, std::vector<std::vector<std::vector<int>>>(nj,
                                                       std::vector<std::vector<int>>(kmax)));
  };
  ix.beta = vec4();
  ix.gamma = vec4();
  ix.tau = vec4();
  ix.eta = vec4();
  ix.D.assign(ni, std::vector<int>(nj, -1));
  ix.Tarr = ix.D;
  ix.Tdep = ix.D;

  for (int i = 0; i < ni; ++i) {
    const bool inner = inst.is_interior(i);
    for (int j = 0; j < nj; ++j) {
      for (int k = 0; k < K(j); ++k) {
        auto tag = fmt::format("{}_{}_{}", i, j, k);
        // Operations are impossible at the origin and destination.
        double zub = inner ? 1.0 : 0.0;
        ix.Zc[i][j][k] = col("Zc_" + tag, "Zc", ColumnKind::binary, 0, zub);
        ix.Zs[i][j][k] = col("Zs_" + tag, "Zs", ColumnKind::binary, 0, zub);
        ix.B[i][j][k] = col("B_" + tag, "B", ColumnKind::binary, 0, 1);
        for (int u = 0; u < n; ++u)
          ix.beta[i][j][k].push_back(
              col(fmt::format("beta_{}_{}", tag, u), "beta", ColumnKind::binary, 0, 1));
        for (int v = 0; v < m; ++v)
          ix.tau[i][j][k].push_back(
              col(fmt::format("tau_{}_{}", tag, v), "tau", ColumnKind::binary, 0, 1));
      }
    }
  }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      auto tag = fmt::format("{}_{}", i, j);
      ix.D[i][j] = col("D_" + tag, "D", ColumnKind::continuous, 0, kInf, cfg.alpha_delay);
      ix.Tarr[i][j] = col("Ta_" + tag, "Tarr", ColumnKind::continuous, 0, kInf);
      ix.Tdep[i][j] = col("Td_" + tag, "Tdep", ColumnKind::continuous, 0, kInf);
      for (int k = 0; k < K(j); ++k) {
        auto t3 = fmt::format("{}_{}", tag, k);
        ix.Sarr[i][j][k] = col("Sa_" + t3, "Sarr", ColumnKind::continuous, 0, 1);
        ix.Sdep[i][j][k] = col("Sd_" + t3, "Sdep", ColumnKind::continuous, 0, 1);
        ix.Tc[i][j][k] = col("Tc_" + t3, "Tc", ColumnKind::continuous, 0, kInf);
        ix.F[i][j][k] = col("F_" + t3, "F", ColumnKind::continuous, 0, kInf);
        for (int u = 0; u <= n; ++u)
          ix.gamma[i][j][k].push_back(
              col(fmt::format("gamma_{}_{}", t3, u), "gamma", ColumnKind::continuous, 0, 1));
        for (int v = 0; v <= m; ++v)
          ix.eta[i][j][k].push_back(
              col(fmt::format("eta_{}_{}", t3, v), "eta", ColumnKind::continuous, 0, 1));
      }
    }

  double wsum = 0.0;
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) wsum += inst.wait_time[i][j];
  mdl.objective_offset = -cfg.alpha_delay * wsum;

  // Rows.
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      row(fmt::format("delay_{}_{}", i, j),
          {{ix.D[i][j], 1}, {ix.Tdep[i][j], -1}, {ix.Tarr[i][j], 1}}, Sense::geq, 0);

  for (int i = 0; i < ni; ++i) {
    if (!inst.is_interior(i)) continue;
    std::vector<Term> ops;
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < K(j); ++k) {
        ops.push_back({ix.Zc[i][j][k], 1});
        ops.push_back({ix.Zs[i][j][k], 1});
      }
    auto cap = ops;
    cap.push_back({ix.X[i], -2.0 * nj * kmax});
    row(fmt::format("undeployed_{}", i), cap, Sense::leq, 0);
    auto must = ops;
    must.push_back({ix.X[i], -1});
    row(fmt::format("deployed_{}", i), must, Sense::geq, 0);
  }

  for (int i = 0; i < ni; ++i) {
    if (!inst.is_interior(i)) continue;
    for (int j = 0; j < nj; ++j) {
      for (int k1 = 0; k1 < K(j); ++k1)
        for (int k2 = 0; k2 < K(j); ++k2)
          row(fmt::format("excl_{}_{}_{}_{}", i, j, k1, k2),
              {{ix.Zs[i][j][k1], 1}, {ix.Zc[i][j][k2], 1}}, Sense::leq, 1);
      std::vector<Term> zs, zc;
      for (int k = 0; k < K(j); ++k) {
        zs.push_back({ix.Zs[i][j][k], 1});
        zc.push_back({ix.Zc[i][j][k], 1});
      }
      row(fmt::format("swapcap_{}_{}", i, j), zs, Sense::leq, inst.full_batteries[i]);
      row(fmt::format("chargecap_{}_{}", i, j), zc, Sense::leq, inst.chargers[i]);
    }
  }

  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      row(fmt::format("wait_{}_{}", i, j), {{ix.Tdep[i][j], 1}, {ix.Tarr[i][j], -1}},
          Sense::geq, inst.wait_time[i][j]);

  for (int j = 0; j < nj; ++j) {
    std::vector<Term> ys;
    for (int k = 0; k < K(j); ++k) ys.push_back({ix.Y[j][k], 1});
    row(fmt::format("maxbat_{}", j), ys, Sense::leq, inst.trains[j].max_batteries);
    for (int k = 0; k + 1 < K(j); ++k) {
      std::vector<Term> t{{ix.Y[j][k], -M}};
      for (int k2 = k + 1; k2 < K(j); ++k2) t.push_back({ix.Y[j][k2], 1});
      row(fmt::format("prefix_{}_{}", j, k), t, Sense::leq, 0);
    }
  }

  for (int i = 0; i + 1 < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      std::vector<Term> t;
      for (int k = 0; k < K(j); ++k) {
        t.push_back({ix.Sdep[i][j][k], 1});
        t.push_back({ix.Sarr[i + 1][j][k], -1});
      }
      row(fmt::format("energy_{}_{}", i, j), t, Sense::eq, inst.leg_energy(j, i));
    }

  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < K(j); ++k) {
        auto tag = fmt::format("{}_{}_{}", i, j, k);
        row("seqa_" + tag, {{ix.Sarr[i][j][k], 1}, {ix.B[i][j][k], -Ms}}, Sense::leq, 0);
        if (k + 1 < K(j))
          row("seqb_" + tag, {{ix.Sarr[i][j][k + 1], -1}, {ix.B[i][j][k], Ms}},
              Sense::leq, Ms - 1);
        row("socup_" + tag, {{ix.Sdep[i][j][k], 1}, {ix.Sarr[i][j][k], -1}}, Sense::geq,
            0);
        row("swapfull_" + tag, {{ix.Sdep[i][j][k], 1}, {ix.Zs[i][j][k], -1}},
            Sense::geq, 0);
        if (i + 1 < ni)
          row("socleg_" + tag, {{ix.Sarr[i + 1][j][k], 1}, {ix.Sdep[i][j][k], -1}},
              Sense::leq, 0);
        if (inst.is_interior(i))
          row("swaptime_" + tag,
              {{ix.Tdep[i][j], 1}, {ix.Tarr[i][j], -1}, {ix.Zs[i][j][k], -inst.swap_hours}},
              Sense::geq, 0);
        row("chargedwell_" + tag,
            {{ix.Tc[i][j][k], 1}, {ix.Tdep[i][j], -1}, {ix.Tarr[i][j], 1}}, Sense::leq, 0);
        row("chargeon_" + tag, {{ix.Tc[i][j][k], 1}, {ix.Zc[i][j][k], -M}}, Sense::leq,
            0);
        row("chargepos_" + tag, {{ix.Zc[i][j][k], 1}, {ix.Tc[i][j][k], -M}},
            Sense::leq, 0);
        row("idle_" + tag,
            {{ix.Sdep[i][j][k], 1},
             {ix.Sarr[i][j][k], -1},
             {ix.Zc[i][j][k], -1},
             {ix.Zs[i][j][k], -1}},
            Sense::leq, 0);
      }

  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < K(j); ++k) {
      auto tag = fmt::format("{}_{}", j, k);
      row("origindep_" + tag, {{ix.Sdep[0][j][k], 1}, {ix.Y[j][k], -1}}, Sense::geq, 0);
      row("originarr_" + tag, {{ix.Sarr[0][j][k], 1}, {ix.Y[j][k], -1}}, Sense::geq, 0);
    }
  for (int j = 0; j < nj; ++j)
    row(fmt::format("origintime_{}", j), {{ix.Tdep[0][j], 1}, {ix.Tarr[0][j], 1}},
        Sense::eq, 0);
  for (int i = 0; i + 1 < ni; ++i)
    for (int j = 0; j < nj; ++j)
      row(fmt::format("travel_{}_{}", i, j),
          {{ix.Tarr[i + 1][j], 1}, {ix.Tdep[i][j], -1}}, Sense::eq, inst.leg_time(j, i));
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < K(j); ++k) {
      auto tag = fmt::format("{}_{}", j, k);
      std::vector<Term> z{{ix.Y[j][k], -2.0 * ni}}, s{{ix.Y[j][k], -2.0 * ni}};
      for (int i = 0; i < ni; ++i) {
        z.push_back({ix.Zc[i][j][k], 1});
        z.push_back({ix.Zs[i][j][k], 1});
        s.push_back({ix.Sarr[i][j][k], 1});
        s.push_back({ix.Sdep[i][j][k], 1});
      }
      row("dummyops_" + tag, z, Sense::leq, 0);
      row("dummysoc_" + tag, s, Sense::leq, 0);
    }

  // Rectangle approximation of the charge curve.
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < K(j); ++k) {
        auto tag = fmt::format("{}_{}_{}", i, j, k);
        const auto& be = ix.beta[i][j][k];
        const auto& ga = ix.gamma[i][j][k];
        const auto& ta = ix.tau[i][j][k];
        const auto& et = ix.eta[i][j][k];
        int F = ix.F[i][j][k], Sd = ix.Sdep[i][j][k];
        row("plaup_" + tag, {{Sd, 1}, {F, 1}, {ix.Zs[i][j][k], -Ms}}, Sense::leq, 1);
        row("plalo_" + tag, {{Sd, 1}, {F, 1}, {ix.Zc[i][j][k], cfg.epsilon}}, Sense::geq,
            1);
        std::vector<Term> sb, sg, st, ss{{ix.Sarr[i][j][k], -1}}, stc{{ix.Tc[i][j][k], -1}};
        for (int u = 0; u < n; ++u) sb.push_back({be[u], 1});
        for (int u = 0; u <= n; ++u) {
          sg.push_back({ga[u], 1});
          ss.push_back({ga[u], grid.s[u]});
        }
        for (int v = 0; v < m; ++v) {
          st.push_back({ta[v], 1});
          stc.push_back({ta[v], grid.t[v]});
          stc.push_back({et[v], grid.dt(v)});
        }
        row("beta1_" + tag, sb, Sense::eq, 1);
        row("gamma1_" + tag, sg, Sense::eq, 1);
        row("tau1_" + tag, st, Sense::eq, 1);
        row("gammas_" + tag, ss, Sense::eq, 0);
        row("etat_" + tag, stc, Sense::eq, 0);
        for (int u = 1; u < n; ++u)
          row(fmt::format("gb_{}_{}", tag, u),
              {{ga[u], 1}, {be[u - 1], -1}, {be[u], -1}}, Sense::leq, 0);
        for (int v = 1; v < m; ++v) {
          row(fmt::format("et2_{}_{}", tag, v), {{et[v], 1}, {ta[v - 1], -1}, {ta[v], -1}},
              Sense::leq, 0);
          row(fmt::format("et1_{}_{}", tag, v), {{et[v], 1}, {ta[v], -1}}, Sense::leq, 0);
        }
        row("gb0_" + tag, {{ga[0], 1}, {be[0], -1}}, Sense::leq, 0);
        row("et0_" + tag, {{et[0], 1}, {ta[0], -1}}, Sense::leq, 0);
        row("gbn_" + tag, {{ga[n], 1}, {be[n - 1], -1}}, Sense::leq, 0);
        row("etm_" + tag, {{et[m], 1}, {ta[m - 1], -1}}, Sense::leq, 0);
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < m; ++v) {
            // F - sum gamma g - eta w  (<= / >=)  +/- M (2 - tau_v - beta_u)
            std::vector<Term> t{{F, 1}, {et[v], -grid.w[u][v]}};
            for (int q = 0; q <= n; ++q) t.push_back({ga[q], -grid.g[q][v]});
            auto up = t;
            up.push_back({ta[v], Ms});
            up.push_back({be[u], Ms});
            row(fmt::format("Fle_{}_{}_{}", tag, u, v), up, Sense::leq, 2 * Ms);
            auto lo = t;
            lo.push_back({ta[v], -Ms});
            lo.push_back({be[u], -Ms});
            row(fmt::format("Fge_{}_{}_{}", tag, u, v), lo, Sense::geq, -2 * Ms);
          }
      }
  return out;
}

namespace {

bool on(const std::vector<double>& x, int c) { return c >= 0 && x[c] > 0.5; }

}  // namespace

Solution decode_solution(const std::vector<double>& x, const PlaModel& pla,
                         const Instance& inst) {
  const auto& ix = pla.index;
  if (x.size() != pla.model.num_columns())
    throw DecodeError(fmt::format("primal has {} values, model has {} columns", x.size(),
                                  pla.model.num_columns()));
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  constexpr double hard = 1e-4;
  auto clamp01 = [&](double v, const char* what) {
    if (v < -hard || v > 1 + hard)
      throw DecodeError(fmt::format("{} = {} outside [0,1]", what, v));
    return std::clamp(v, 0.0, 1.0);
  };
  auto nonneg = [&](double v, const char* what) {
    if (v < -hard) throw DecodeError(fmt::format("{} = {} negative", what, v));
    return std::max(v, 0.0);
  };

  Solution s = Solution::empty_for(inst);
  for (int i = 0; i < ni; ++i) s.deployed[i] = on(x, ix.X[i]);
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < inst.trains[j].consists; ++k) s.has_battery[j][k] = on(x, ix.Y[j][k]);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      s.arrive_time[i][j] = nonneg(x[ix.Tarr[i][j]], "arrival time");
      s.depart_time[i][j] = nonneg(x[ix.Tdep[i][j]], "departure time");
      s.delay[i][j] = nonneg(x[ix.D[i][j]], "delay");
      double dwell = s.depart_time[i][j] - s.arrive_time[i][j];
      if (dwell < inst.wait_time[i][j] - hard)
        throw DecodeError(fmt::format("dwell below wait at station {} train {}", i, j));
      if (s.delay[i][j] < dwell - hard)
        throw DecodeError(fmt::format("delay below dwell at station {} train {}", i, j));
      bool any_c = false, any_s = false;
      for (int k = 0; k < inst.trains[j].consists; ++k) {
        s.charge_flag[i][j][k] = on(x, ix.Zc[i][j][k]);
        s.swap_flag[i][j][k] = on(x, ix.Zs[i][j][k]);
        s.battery_nonempty[i][j][k] = on(x, ix.B[i][j][k]);
        s.charge_hours[i][j][k] = nonneg(x[ix.Tc[i][j][k]], "charge hours");
        if (s.charge_hours[i][j][k] < 1e-6) s.charge_hours[i][j][k] = 0.0;
        s.soc_arrive[i][j][k] = clamp01(x[ix.Sarr[i][j][k]], "arrival SOC");
        s.soc_depart[i][j][k] = clamp01(x[ix.Sdep[i][j][k]], "departure SOC");
        if (s.soc_depart[i][j][k] < s.soc_arrive[i][j][k] - hard)
          throw DecodeError("departure SOC below arrival SOC");
        s.soc_depart[i][j][k] = std::max(s.soc_depart[i][j][k], s.soc_arrive[i][j][k]);
        any_c = any_c || s.charge_flag[i][j][k];
        any_s = any_s || s.swap_flag[i][j][k];
      }
      if (any_c && any_s)
        throw DecodeError(fmt::format("train {} both charges and swaps at station {}", j, i));
    }
  return s;
}

double objective_of(const Instance& inst, const SolveConfig& cfg, const Solution& s) {
  double setup = 0.0, delay = 0.0;
  for (std::size_t i = 0; i < inst.num_stations(); ++i) {
    if (s.deployed[i]) setup += inst.fixed_cost[i];
    for (std::size_t j = 0; j < inst.num_trains(); ++j)
      delay += s.delay[i][j] - inst.wait_time[i][j];
  }
  return cfg.alpha_fixed * setup + cfg.alpha_delay * delay;
}

std::vector<double> encode_solution(const Solution& s, const PlaModel& pla,
                                    const Instance& inst) {
  const auto& ix = pla.index;
  const auto& grid = pla.grid;
  std::vector<double> x(pla.model.num_columns(), 0.0);
  auto set = [&](int c, double v) {
    if (c >= 0) x[c] = v;
  };
  const int ni = static_cast<int>(inst.num_stations());
  const int nj = static_cast<int>(inst.num_trains());
  for (int i = 0; i < ni; ++i) set(ix.X[i], s.deployed[i]);
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < inst.trains[j].consists; ++k) set(ix.Y[j][k], s.has_battery[j][k]);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      set(ix.Tarr[i][j], s.arrive_time[i][j]);
      set(ix.Tdep[i][j], s.depart_time[i][j]);
      set(ix.D[i][j], s.delay[i][j]);
      for (int k = 0; k < inst.trains[j].consists; ++k) {
        double sa = s.soc_arrive[i][j][k], sd = s.soc_depart[i][j][k];
        double tc = s.charge_hours[i][j][k];
        set(ix.Zc[i][j][k], s.charge_flag[i][j][k]);
        set(ix.Zs[i][j][k], s.swap_flag[i][j][k]);
        set(ix.B[i][j][k], s.battery_nonempty[i][j][k]);
        set(ix.Sarr[i][j][k], sa);
        set(ix.Sdep[i][j][k], sd);
        set(ix.Tc[i][j][k], tc);
        int u = cell_of(grid.s, sa);
        int v = cell_of(grid.t, tc);
        double lam = (sa - grid.s[u]) / (grid.s[u + 1] - grid.s[u]);
        set(ix.beta[i][j][k][u], 1);
        set(ix.gamma[i][j][k][u], 1 - lam);
        set(ix.gamma[i][j][k][u + 1], lam);
        set(ix.tau[i][j][k][v], 1);
        set(ix.eta[i][j][k][v], (tc - grid.t[v]) / grid.dt(v));
        // Swapped consists keep F on the surface; others take it from the SOC jump.
        double f = s.swap_flag[i][j][k] ? grid.approx(sa, tc) : 1.0 - sd;
        set(ix.F[i][j][k], std::max(0.0, f));
      }
    }
  return x;
}

Solution solve_built(PlaModel& pla, const Instance& inst, const SolveConfig& cfg,
                     SolverBackend& backend, const PlaSolveOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  if (!opt.dump_model.empty()) backend.write_lp(pla.model, opt.dump_model);
  SolveOutcome res = backend.solve(pla.model, opt.limits);
  Solution s;
  if (res.has_primal()) {
    s = decode_solution(res.primal, pla, inst);
    s.objective_value = res.objective;
    s.bound = res.bound;
    s.gap = res.gap;
    s.status = res.status == OutcomeStatus::optimal ? SolveStatus::optimal
                                                    : SolveStatus::feasible_limit;
    double check = objective_of(inst, cfg, s);
    if (std::abs(check - res.objective) > 1e-4 * std::max(1.0, std::abs(res.objective)))
      throw DecodeError(fmt::format("decoded objective {} differs from solver objective {}",
                                    check, res.objective));
  } else {
    s = Solution::empty_for(inst);
    s.status = res.status == OutcomeStatus::infeasible ? SolveStatus::infeasible
                                                       : SolveStatus::error;
  }
  s.log["backend"] = backend.name();
  s.log["backend_status"] = res.message;
  s.log["hit_limit"] = res.hit_limit;
  s.log["columns"] = pla.model.num_columns();
  s.log["rows"] = pla.model.num_rows();
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

Solution solve_pla(const Instance& inst, const SolveConfig& cfg, SolverBackend& backend,
                   const std::string& dump_model) {
  PlaModel pla = build_model(inst, cfg);
  PlaSolveOptions opt;
  opt.limits.gap = cfg.mip_gap;
  opt.limits.seconds = cfg.time_limit_seconds;
  opt.limits.seed = cfg.seed;
  opt.dump_model = dump_model;
  Solution s = solve_built(pla, inst, cfg, backend, opt);
  s.algorithm = "pla";
  if (s.status == SolveStatus::error && s.log.value("hit_limit", false))
    s.log["note"] = "time limit reached without an incumbent";
  return s;
}

}  // namespace railvolt
