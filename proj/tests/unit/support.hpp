#ifndef QSWELD_TESTS_SUPPORT_HPP
#define QSWELD_TESTS_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "qsweld/common.hpp"

namespace qsweld::test {

inline Complex random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

// Fresh scratch directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("qsweld_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

#define CHECK_THROWS_CODE(expr, ecode)                 \
  do {                                                 \
    bool thrown_ = false;                              \
    try {                                              \
      (void)(expr);                                    \
    } catch (const ::qsweld::Error& e_) {              \
      thrown_ = true;                                  \
      CHECK_MESSAGE(e_.code() == (ecode), e_.what());  \
    }                                                  \
    CHECK_MESSAGE(thrown_, "expected " #ecode);        \
  } while (0)

}  // namespace qsweld::test

#endif
