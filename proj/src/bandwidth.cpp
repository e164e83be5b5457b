#include "fht/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fht {

BandwidthGrid BandwidthGrid::default_for(int n, int covariate_dim) {
  if (n < 1) throw std::invalid_argument("bandwidth grid needs n >= 1");
  const double lo =
      std::pow(static_cast<double>(n), -1.0 / (2.0 + covariate_dim)) / 4.0;
  const double hi = 1.0;
  constexpr int count = 20;
  BandwidthGrid grid;
  grid.candidates.resize(count);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    grid.candidates[i] = lo * std::pow(hi / lo, f);
  }
  return grid;
}

namespace {

struct UsableSample {
  std::vector<double> z;  // sorted ascending, ties broken by u
  std::vector<double> u;  // aligned with z
  double u_mean = 0.0;

  // prefix sums over the sorted order; long double keeps window differences
  // well below the 1e-10 reference tolerance
  std::vector<long double> s1, sz, szz, su, szu, szzu;
};

// Canonical (z,u)-sorted view of the records with m >= 1. Sorting makes the
// error sum a pure function of the record multiset, so permuting the dataset
// cannot change the result even in the last bit.
UsableSample collect_usable(const Dataset& ds) {
  UsableSample s;
  std::vector<std::pair<double, double>> pts;  // (z, u)
  for (const auto& rec : ds.records) {
    if (rec.m < 1) continue;
    if (rec.z.size() != 1)
      throw std::invalid_argument("cpe: fast path requires scalar covariates");
    pts.emplace_back(rec.z[0], rec.hit_time / rec.m);
  }
  if (pts.size() < 2)
    throw InsufficientDataError("cpe: needs at least 2 records with m >= 1");
  std::sort(pts.begin(), pts.end());

  const std::size_t m = pts.size();
  s.z.resize(m);
  s.u.resize(m);
  for (std::size_t pos = 0; pos < m; ++pos) {
    s.z[pos] = pts[pos].first;
    s.u[pos] = pts[pos].second;
  }
  double total = 0.0;
  for (double u : s.u) total += u;
  s.u_mean = total / static_cast<double>(m);

  s.s1.assign(m + 1, 0.0L);
  s.sz.assign(m + 1, 0.0L);
  s.szz.assign(m + 1, 0.0L);
  s.su.assign(m + 1, 0.0L);
  s.szu.assign(m + 1, 0.0L);
  s.szzu.assign(m + 1, 0.0L);
  for (std::size_t i = 0; i < m; ++i) {
    const long double z = s.z[i], u = s.u[i];
    s.s1[i + 1] = s.s1[i] + 1.0L;
    s.sz[i + 1] = s.sz[i] + z;
    s.szz[i + 1] = s.szz[i] + z * z;
    s.su[i + 1] = s.su[i] + u;
    s.szu[i + 1] = s.szu[i] + z * u;
    s.szzu[i + 1] = s.szzu[i] + z * z * u;
  }
  return s;
}

double kappa1(double d2) { return d2 <= 1.0 ? 0.5 * (4.0 / 3.0 - d2) : 0.0; }

// window [lo, hi) of sorted points whose scaled squared distance to q is <= 1
std::pair<int, int> kernel_window(const UsableSample& s, double q, double h) {
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(q) + h + 1.0);
  int lo = static_cast<int>(std::lower_bound(s.z.begin(), s.z.end(),
                                             q - h - slack) -
                            s.z.begin());
  int hi = static_cast<int>(std::upper_bound(s.z.begin(), s.z.end(),
                                             q + h + slack) -
                            s.z.begin());
  const auto d2 = [&](int i) {
    const double d = (q - s.z[i]) / h;
    return d * d;
  };
  while (lo < hi && d2(lo) > 1.0) ++lo;
  while (hi > lo && d2(hi - 1) > 1.0) --hi;
  return {lo, hi};
}

// kernel sums over the window from the quadratic expansion
// kappa = 2/3 - (q^2 - 2 q Z + Z^2) / (2 h^2)
void window_sums(const UsableSample& s, int lo, int hi, double q, double h,
                 double& den, double& num) {
  const long double inv2h2 = 0.5L / (static_cast<long double>(h) * h);
  const long double qq = static_cast<long double>(q) * q;
  const long double c1 = s.s1[hi] - s.s1[lo];
  const long double cz = s.sz[hi] - s.sz[lo];
  const long double czz = s.szz[hi] - s.szz[lo];
  const long double cu = s.su[hi] - s.su[lo];
  const long double czu = s.szu[hi] - s.szu[lo];
  const long double czzu = s.szzu[hi] - s.szzu[lo];
  den = static_cast<double>((2.0L / 3.0L) * c1 -
                            inv2h2 * (qq * c1 - 2.0L * q * cz + czz));
  num = static_cast<double>((2.0L / 3.0L) * cu -
                            inv2h2 * (qq * cu - 2.0L * q * czu + czzu));
}

// fixed_q: when non-null, all predictions are taken at *fixed_q instead of
// at the left-out record's covariate
double cpe_engine(const Dataset& ds, double h, const double* fixed_q) {
  if (!(h > 0.0)) throw std::invalid_argument("cpe: bandwidth must be > 0");
  const UsableSample s = collect_usable(ds);
  const std::size_t m = s.z.size();

  double total = 0.0;
  for (std::size_t pos = 0; pos < m; ++pos) {
    const double q = fixed_q ? *fixed_q : s.z[pos];
    const auto [lo, hi] = kernel_window(s, q, h);

    const double dself = (q - s.z[pos]) / h;
    const bool self_in =
        static_cast<int>(pos) >= lo && static_cast<int>(pos) < hi;
    const double kself = self_in ? kappa1(dself * dself) : 0.0;

    const int others = (hi - lo) - (self_in ? 1 : 0);
    double pred;
    if (others <= 0) {
      pred = s.u_mean;
    } else {
      double den, num;
      window_sums(s, lo, hi, q, h, den, num);
      pred = (num - kself * s.u[pos]) / (den - kself);
    }
    const double r = s.u[pos] - pred;
    total += r * r;
  }
  return total;
}

std::vector<int> fold_exclusion(int n, int fold, FoldScheme scheme) {
  // fold is 1-based
  int lo, hi;
  if (scheme == FoldScheme::FixedBlocks) {
    lo = 10 * (fold - 1);
    hi = std::min(10 * fold, n);
  } else {
    lo = static_cast<int>(static_cast<long>(fold - 1) * n / 10);
    hi = static_cast<int>(static_cast<long>(fold) * n / 10);
  }
  std::vector<int> out;
  for (int i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

}  // namespace

double cpe(const Dataset& ds, double h) { return cpe_engine(ds, h, nullptr); }

double cpe_at(const Dataset& ds, double h, const std::vector<double>& z) {
  if (z.size() != 1)
    throw std::invalid_argument("cpe_at: scalar covariates only");
  const double q = z[0];
  return cpe_engine(ds, h, &q);
}

namespace {

BandwidthSelection select_bandwidth_impl(const Dataset& ds,
                                         const BandwidthGrid& grid,
                                         FoldScheme scheme,
                                         const std::vector<double>* fixed_z) {
  const int n = static_cast<int>(ds.records.size());
  if (n < 20)
    throw InsufficientDataError("select_bandwidth: needs n >= 20 records");
  if (grid.candidates.empty())
    throw std::invalid_argument("select_bandwidth: empty candidate grid");

  BandwidthSelection sel;
  sel.fold_h.reserve(10);
  for (int fold = 1; fold <= 10; ++fold) {
    const std::vector<int> excluded = fold_exclusion(n, fold, scheme);
    Dataset sub;
    sub.covariate_dim = ds.covariate_dim;
    sub.n_states = ds.n_states;
    std::size_t e = 0;
    for (int i = 0; i < n; ++i) {
      if (e < excluded.size() && excluded[e] == i) {
        ++e;
        continue;
      }
      sub.records.push_back(ds.records[i]);
    }

    double best_h = grid.candidates.front();
    double best_cpe = std::numeric_limits<double>::infinity();
    for (double h : grid.candidates) {
      const double value = fixed_z ? cpe_at(sub, h, *fixed_z) : cpe(sub, h);
      if (value < best_cpe) {  // strict: ties keep the smaller bandwidth
        best_cpe = value;
        best_h = h;
      }
    }
    sel.fold_h.push_back(best_h);
  }
  // when every fold agrees, keep the candidate bit-exact instead of
  // round-tripping it through the mean
  const bool unanimous =
      std::all_of(sel.fold_h.begin(), sel.fold_h.end(),
                  [&](double h) { return h == sel.fold_h.front(); });
  sel.h = unanimous ? sel.fold_h.front()
                    : std::accumulate(sel.fold_h.begin(), sel.fold_h.end(),
                                      0.0) /
                          static_cast<double>(sel.fold_h.size());
  return sel;
}

}  // namespace

BandwidthSelection select_bandwidth(const Dataset& ds, const BandwidthGrid& grid,
                                    FoldScheme scheme) {
  return select_bandwidth_impl(ds, grid, scheme, nullptr);
}

BandwidthSelection select_bandwidth_at(const Dataset& ds,
                                       const BandwidthGrid& grid,
                                       const std::vector<double>& z,
                                       FoldScheme scheme) {
  return select_bandwidth_impl(ds, grid, scheme, &z);
}

}  // namespace fht
