#include "uvstat/common.hpp"

#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

namespace uvstat {

std::string to_hex(uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void CascadeSum::add(double x) {
  std::size_t i = 0;
  while (i < levels_.size() && occupied_[i]) {
    x += levels_[i];
    occupied_[i] = false;
    ++i;
  }
  if (i == levels_.size()) {
    levels_.push_back(x);
    occupied_.push_back(true);
  } else {
    levels_[i] = x;
    occupied_[i] = true;
  }
}

double CascadeSum::total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (occupied_[i]) s += levels_[i];
  return s;
}

void CascadeSum::reset() {
  levels_.clear();
  occupied_.clear();
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) throw std::invalid_argument("parallel_for: workers must be >= 1");
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned spawn = static_cast<unsigned>(
      std::min<std::size_t>(workers, count));
  pool.reserve(spawn);
  for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace uvstat
