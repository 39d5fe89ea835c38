#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace qarena::gateway {

struct HttpRequest {
  std::string method;  // upper case
  std::string target;  // path plus optional query
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;

  std::optional<std::string> header(const std::string& name) const;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();
};

// Thrown by handlers; rendered as {code, message} with `status`.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

HttpResponse error_response(int status, const std::string& code, const std::string& message);

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

// Splits "/a/b?x=1&y=%20" into path and percent-decoded query values.
Target parse_target(std::string_view target);
// `plus_is_space` applies form encoding, as used in query strings.
std::string percent_decode(std::string_view s, bool plus_is_space);

}  // namespace qarena::gateway
