#ifndef DELAN_TESTS_TEST_UTIL_HPP_
#define DELAN_TESTS_TEST_UTIL_HPP_

#include <random>

#include "delan/types.hpp"

namespace delan::test {

inline Mat random_mat(int rows, int cols, std::mt19937_64& rng,
                      double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

inline Vec random_vec(int len, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vec v(len);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_err(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    m = std::max(m, rel_err(a[i], b[i]));
  return m;
}

inline double max_rel_err(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    m = std::max(m, rel_err(a.data()[i], b.data()[i]));
  return m;
}

}  // namespace delan::test

#endif  // DELAN_TESTS_TEST_UTIL_HPP_
