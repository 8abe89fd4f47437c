#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "dinterp/parallel.hpp"

using namespace dinterp;

TEST_CASE("parallel_for visits every index once") {
  for (std::size_t threads : {1, 2, 5}) {
    set_thread_count(threads);
    std::vector<int> hits(103, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  set_thread_count(0);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  set_thread_count(4);
  try {
    parallel_for(40, [](std::size_t i) {
      if (i == 7 || i == 33) throw std::runtime_error(std::to_string(i));
    });
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
  set_thread_count(0);
}
