#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "qarena/common/clock.hpp"

namespace qarena::gateway {

inline constexpr Timestamp kTokenLifetime = 24 * kHour;
inline constexpr std::size_t kTokenBytes = 32;

struct SessionToken {
  std::string token;  // hex of 32 random bytes
  std::string username;
  Timestamp expires_at = 0;
};

class TokenStore {
 public:
  explicit TokenStore(const Clock& clock, Timestamp lifetime = kTokenLifetime);

  SessionToken issue(const std::string& username);
  // Username bound to a live token. Expired tokens are removed.
  std::optional<std::string> resolve(const std::string& token);
  void revoke(const std::string& token);

 private:
  const Clock& clock_;
  Timestamp lifetime_;
  std::mutex mu_;
  std::map<std::string, SessionToken> tokens_;
};

}  // namespace qarena::gateway
