#pragma once

// Small stand-alone best-response flow for 3x3 games, used as a cross-check of
// the library simulator. Plain arrays, no tie tolerance games: after a switch
// the catching strategy is adopted explicitly.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace reference {

using V3 = std::array<double, 3>;
using M3 = std::array<V3, 3>;

inline M3 shapley_a(double b) { return {{{1, 0, b}, {b, 1, 0}, {0, b, 1}}}; }
inline M3 shapley_b(double b) { return {{{-b, 1, 0}, {0, -b, 1}, {1, 0, -b}}}; }

struct Switch {
  char player;  // 'A' or 'B'
  int from, to;
  double s;     // duration of the piece that ended here
  V3 va, vb;    // state at the switch
};

struct Flow {
  M3 a, b;
  V3 va, vb;
  int i, j;  // current pure plays of A and B

  static int argmax(const V3& v) {
    int k = 0;
    for (int c = 1; c < 3; ++c)
      if (v[c] > v[k]) k = c;
    return k;
  }

  Flow(const M3& a_, const M3& b_, const V3& va_, const V3& vb_) : a(a_), b(b_), va(va_), vb(vb_) {
    i = argmax(va);
    j = argmax(vb);
  }

  // Advance to the next switch of either player.
  Switch step() {
    V3 ta{a[0][j], a[1][j], a[2][j]};  // column j of A
    V3 tb = b[i];                      // row i of B
    double best = std::numeric_limits<double>::infinity();
    char who = 'A';
    int catcher = -1;
    auto scan = [&](const V3& v, const V3& t, int cur, char p) {
      for (int k = 0; k < 3; ++k) {
        if (k == cur) continue;
        const double d0 = v[k] - v[cur], d1 = t[k] - t[cur];
        if (d1 <= 0.0 || d0 >= 0.0) continue;
        const double s = d0 / (d0 - d1);
        if (s < best) {
          best = s;
          who = p;
          catcher = k;
        }
      }
    };
    scan(va, ta, i, 'A');
    scan(vb, tb, j, 'B');
    if (catcher < 0) return {'-', -1, -1, 1.0, ta, tb};
    for (int k = 0; k < 3; ++k) {
      va[k] = (1 - best) * va[k] + best * ta[k];
      vb[k] = (1 - best) * vb[k] + best * tb[k];
    }
    Switch sw{who, who == 'A' ? i : j, catcher, best, va, vb};
    (who == 'A' ? i : j) = catcher;
    return sw;
  }
};

}  // namespace reference
