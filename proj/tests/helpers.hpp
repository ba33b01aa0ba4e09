#pragma once

#include <initializer_list>
#include <memory>
#include <string>

#include "mpcc/problem.hpp"

namespace testing_util {

inline std::string corpus_path(const std::string& name) { return std::string(MPCC_CORPUS_DIR) + "/" + name + ".mpcc"; }

inline mpcc::MpccProblem corpus(const std::string& name) { return mpcc::load_problem(corpus_path(name)); }

inline std::shared_ptr<const mpcc::MpccProblem> shared_corpus(const std::string& name) {
  return std::make_shared<const mpcc::MpccProblem>(corpus(name));
}

inline mpcc::Vector vec(std::initializer_list<double> v) {
  mpcc::Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace testing_util
