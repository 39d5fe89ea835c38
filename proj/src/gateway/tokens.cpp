#include "qarena/gateway/tokens.hpp"

#include <sodium.h>

#include <stdexcept>

namespace qarena::gateway {

TokenStore::TokenStore(const Clock& clock, Timestamp lifetime) : clock_(clock), lifetime_(lifetime) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialise");
}

SessionToken TokenStore::issue(const std::string& username) {
  unsigned char raw[kTokenBytes];
  randombytes_buf(raw, sizeof raw);
  char hex[2 * kTokenBytes + 1];
  sodium_bin2hex(hex, sizeof hex, raw, sizeof raw);
  SessionToken t{hex, username, clock_.now() + lifetime_};
  std::lock_guard lock(mu_);
  // Drop expired entries so the map does not grow without bound.
  const Timestamp now = clock_.now();
  for (auto it = tokens_.begin(); it != tokens_.end();) {
    it = it->second.expires_at <= now ? tokens_.erase(it) : std::next(it);
  }
  tokens_[t.token] = t;
  return t;
}

std::optional<std::string> TokenStore::resolve(const std::string& token) {
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) return std::nullopt;
  if (clock_.now() >= it->second.expires_at) {
    tokens_.erase(it);
    return std::nullopt;
  }
  return it->second.username;
}

void TokenStore::revoke(const std::string& token) {
  std::lock_guard lock(mu_);
  tokens_.erase(token);
}

}  // namespace qarena::gateway
