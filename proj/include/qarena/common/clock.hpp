#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace qarena {

// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecond = 1000;
inline constexpr Timestamp kHour = 3600 * kSecond;
inline constexpr Timestamp kDay = 24 * kHour;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }
};

// Test clock; only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = 1'700'000'000'000) : now_(start) {}
  Timestamp now() const override { return now_.load(); }
  void advance(Timestamp ms) { now_ += ms; }
  void set(Timestamp t) { now_ = t; }

 private:
  std::atomic<Timestamp> now_;
};

}  // namespace qarena
