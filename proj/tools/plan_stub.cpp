// Newline-delimited JSON plan provider stub. Speaks the plan-request wire
// protocol on stdin/stdout without linking the core library, so it doubles as
// an independent conformance peer for the client tests and as a demo external
// planner:
//
//   plan_stub [mode]
//
// modes: echo (default), error, bad-bearing, garbage, close-mid, slow, short
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

using nlohmann::json;

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  const std::string mode = argc > 1 ? argv[1] : "echo";

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;

    if (mode == "garbage") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }

    json req = json::parse(line, nullptr, false);
    if (req.is_discarded()) {
      std::cout << json{{"v", 1}, {"type", "error"}, {"message", "bad request"}}.dump() << "\n"
                << std::flush;
      continue;
    }
    const int horizon = req.value("horizon_frames", 1);
    json frame = req.value("frame", json::object());
    const int base_index = frame.value("index", 0);

    if (mode == "error") {
      std::cout << json{{"v", 1}, {"type", "error"}, {"message", "stub failure"}}.dump() << "\n"
                << std::flush;
      continue;
    }
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::seconds(2));

    int count = horizon + 1;
    if (mode == "short") count = horizon / 2 + 1;

    json frames = json::array();
    for (int k = 0; k < count; ++k) {
      json f = frame;
      f["index"] = base_index + k;
      if (mode == "bad-bearing" && k == 1) {
        if (!f["observations"].empty())
          f["observations"][0]["bearing"] = 4.0;
        else
          f["observations"].push_back({{"id", 999}, {"range", 1.0}, {"bearing", 4.0}});
      }
      frames.push_back(std::move(f));
    }
    const std::string out = json{{"v", 1}, {"type", "plan_response"}, {"frames", frames}}.dump();

    if (mode == "close-mid") {
      std::fwrite(out.data(), 1, out.size() / 2, stdout);
      std::fflush(stdout);
      return 0;
    }
    std::cout << out << "\n" << std::flush;
  }
  return 0;
}
