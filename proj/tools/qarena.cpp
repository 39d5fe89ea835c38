#include <signal.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qarena/gateway/server.hpp"
#include "qarena/guard/question_json.hpp"
#include "qarena/registry/registry.hpp"
#include "qarena/sql/executor.hpp"
#include "qarena/sql/parser.hpp"

namespace {

using namespace qarena;

int serve(const std::string& data, const std::string& bank, const std::string& address, unsigned short port,
          int threads) {
  // Block the stop signals before any worker thread starts so only sigwait sees them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);

  SystemClock clock;
  registry::RegistryOptions opts;
  opts.data_dir = data;
  opts.seed_bank = bank;
  registry::Registry reg(clock, opts);
  if (!reg.has_admin()) spdlog::warn("no administrator yet; create one with `qarena add-admin`");
  spdlog::info("{} questions loaded", reg.questions().size());
  gateway::Service service(reg, clock);
  gateway::Server server(service, {address, port, threads});
  server.start();
  int sig = 0;
  sigwait(&stop, &sig);
  spdlog::info("signal {}, shutting down", sig);
  server.stop();
  reg.snapshot();
  return 0;
}

// Reads one statement per line and prints what the engine returns.
int sql_shell(std::istream& in) {
  sql::Database db;
  std::string line;
  int failures = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      sql::ExecOutcome r = sql::execute(db, sql::parse(line));
      if (r.has_rows()) {
        std::cout << sql::serialize_result(r.rows()) << "\n";
      } else {
        std::cout << r.affected() << " row(s) affected\n";
      }
    } catch (const sql::SqlError& e) {
      ++failures;
      std::cout << "ERROR " << sql::to_string(e.kind()) << ": " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int check_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return 2;
  }
  try {
    auto bank = guard::load_question_bank(in);
    std::map<int, int> by_difficulty;
    for (const auto& q : bank) ++by_difficulty[q.difficulty];
    std::cout << bank.size() << " questions OK";
    for (const auto& [d, n] : by_difficulty) std::cout << "; difficulty " << d << ": " << n;
    std::cout << "\n";
    return 0;
  } catch (const guard::InvalidQuestion& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }
}

int add_admin(const std::string& data, const std::string& actor, const std::string& username,
              const std::string& password, const std::string& name) {
  SystemClock clock;
  registry::RegistryOptions opts;
  opts.data_dir = data;
  registry::Registry reg(clock, opts);
  try {
    reg.create_admin(actor, username, password, {name, ""});
  } catch (const registry::RegistryError& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 1;
  }
  std::cout << "administrator " << username << " created\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query arena: SQL practice and competition server"};
  app.require_subcommand(1);

  std::string data = "data", bank, address = "127.0.0.1";
  unsigned short port = 8080;
  int threads = 2;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP/WebSocket server");
  serve_cmd->add_option("--data", data, "data directory")->capture_default_str();
  serve_cmd->add_option("--bank", bank, "question bank copied in when the data directory has none");
  serve_cmd->add_option("--address", address)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--threads", threads)->capture_default_str();

  std::string script;
  auto* sql_cmd = app.add_subcommand("sql", "run statements, one per line, on a scratch database");
  sql_cmd->add_option("file", script, "statement file (default: stdin)");

  std::string bank_path;
  auto* check_cmd = app.add_subcommand("check-bank", "validate a questions.ndjson file");
  check_cmd->add_option("file", bank_path)->required();

  std::string actor, username, password, name;
  auto* admin_cmd = app.add_subcommand("add-admin", "create an administrator account");
  admin_cmd->add_option("--data", data)->capture_default_str();
  admin_cmd->add_option("--as", actor, "existing administrator (not needed for the first one)");
  admin_cmd->add_option("--username", username)->required();
  admin_cmd->add_option("--password", password)->required();
  admin_cmd->add_option("--name", name);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(data, bank, address, port, threads);
    if (*sql_cmd) {
      if (script.empty()) return sql_shell(std::cin);
      std::ifstream in(script);
      if (!in) {
        std::cerr << "cannot open " << script << "\n";
        return 2;
      }
      return sql_shell(in);
    }
    if (*check_cmd) return check_bank(bank_path);
    if (*admin_cmd) return add_admin(data, actor, username, password, name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
