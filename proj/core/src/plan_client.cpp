#include "visnav/plan_client.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "visnav/errors.hpp"

namespace visnav::wire {

using nlohmann::json;

namespace {

double monotonic_now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

[[noreturn]] void throw_errno(const std::string& what) {
  throw ProtocolError(what + ": " + std::strerror(errno));
}

}  // namespace

FdTransport::FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

FdTransport::~FdTransport() {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void FdTransport::send_line(const std::string& line) {
  std::string data = line;
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + sent, data.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send_line: write failed");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdTransport::recv_line(double timeout_s) {
  const double deadline = monotonic_now() + timeout_s;
  while (true) {
    const auto nl = buf_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      return line;
    }
    const double remaining = deadline - monotonic_now();
    if (remaining <= 0.0) throw TimeoutError("recv_line: timed out waiting for a response");
    struct pollfd pfd{read_fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(std::ceil(remaining * 1000.0)));
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv_line: poll failed");
    }
    if (pr == 0) throw TimeoutError("recv_line: timed out waiting for a response");
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv_line: read failed");
    }
    if (n == 0) {
      if (buf_.empty()) return std::nullopt;  // clean EOF at a message boundary
      throw ProtocolError("recv_line: stream closed mid-message");
    }
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

SubprocessTransport::SubprocessTransport(const std::vector<std::string>& argv) {
  if (argv.empty()) throw std::invalid_argument("subprocess: empty argv");
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw_errno("subprocess: pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw_errno("subprocess: pipe failed");
  }
  pid_ = ::fork();
  if (pid_ < 0) throw_errno("subprocess: fork failed");
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  stream_ = std::make_unique<FdTransport>(from_child[0], to_child[1]);
}

SubprocessTransport::~SubprocessTransport() {
  stream_.reset();  // closing the pipes lets the child exit
  if (pid_ > 0) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
  }
}

void SubprocessTransport::send_line(const std::string& line) { stream_->send_line(line); }

std::optional<std::string> SubprocessTransport::recv_line(double timeout_s) {
  return stream_->recv_line(timeout_s);
}

std::unique_ptr<PlanTransport> connect_tcp(const std::string& host, int port, double timeout_s) {
  struct addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr)
    throw ProtocolError("connect_tcp: cannot resolve " + host);

  int fd = -1;
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    if (errno == EINPROGRESS) {
      struct pollfd pfd{fd, POLLOUT, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(std::ceil(timeout_s * 1000.0)));
      int err = 0;
      socklen_t len = sizeof(err);
      if (pr > 0 && ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) == 0 && err == 0) break;
    }
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw ProtocolError("connect_tcp: cannot connect to " + host + ":" + service);
  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
  return std::make_unique<FdTransport>(fd, fd);
}

std::unique_ptr<PlanTransport> open_endpoint(const std::string& endpoint, double timeout_s) {
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("endpoint: expected tcp:HOST:PORT, got " + endpoint);
    return connect_tcp(rest.substr(0, colon), std::stoi(rest.substr(colon + 1)), timeout_s);
  }
  if (endpoint.rfind("exec:", 0) == 0) {
    std::istringstream ss(endpoint.substr(5));
    std::vector<std::string> argv;
    std::string tok;
    while (ss >> tok) argv.push_back(tok);
    if (argv.empty()) throw std::invalid_argument("endpoint: empty exec command");
    return std::make_unique<SubprocessTransport>(argv);
  }
  throw std::invalid_argument("endpoint: expected tcp:... or exec:..., got " + endpoint);
}

namespace {

json frame_to_json(const sim::Frame& f) {
  json obs = json::array();
  for (const auto& o : f.observations)
    obs.push_back({{"id", o.id}, {"range", o.range}, {"bearing", o.bearing}});
  return json{{"index", f.frame_index}, {"observations", std::move(obs)}, {"scan", f.scan}};
}

[[noreturn]] void bad_type(const std::string& path, const char* expected) {
  throw ProtocolError("response: " + path + ": expected " + expected);
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_type(path, "a number");
  return j.get<double>();
}

sim::Frame parse_frame(const json& j, const std::string& path, const sim::SensorConfig* sensor) {
  if (!j.is_object()) bad_type(path, "an object");
  sim::Frame f;
  if (!j.contains("index") || !j["index"].is_number_integer()) bad_type(path + ".index", "an integer");
  f.frame_index = j["index"].get<int>();

  if (!j.contains("observations") || !j["observations"].is_array())
    bad_type(path + ".observations", "an array");
  std::size_t i = 0;
  for (const auto& o : j["observations"]) {
    const std::string opath = path + ".observations[" + std::to_string(i++) + "]";
    if (!o.is_object()) bad_type(opath, "an object");
    if (!o.contains("id") || !o["id"].is_number_integer()) bad_type(opath + ".id", "an integer");
    sim::Observation obs;
    obs.id = o["id"].get<int>();
    obs.range = require_number(o.value("range", json()), opath + ".range");
    obs.bearing = require_number(o.value("bearing", json()), opath + ".bearing");
    if (!std::isfinite(obs.range) || obs.range <= 0.0)
      throw ValidationError("response: " + opath + ".range: must be finite and positive");
    if (sensor && obs.range > sensor->max_range + 1e-9)
      throw ValidationError("response: " + opath + ".range: exceeds max_range");
    if (!std::isfinite(obs.bearing) || obs.bearing <= -kPi || obs.bearing > kPi)
      throw ValidationError("response: " + opath + ".bearing: outside (-pi, pi]");
    if (sensor && std::abs(obs.bearing) > sensor->fov / 2.0 + 1e-9)
      throw ValidationError("response: " + opath + ".bearing: outside the field of view");
    f.observations.push_back(obs);
  }
  for (std::size_t k = 1; k < f.observations.size(); ++k)
    if (f.observations[k].id == f.observations[k - 1].id)
      throw ValidationError("response: " + path + ".observations: duplicate landmark id " +
                            std::to_string(f.observations[k].id));

  if (!j.contains("scan") || !j["scan"].is_array()) bad_type(path + ".scan", "an array");
  i = 0;
  for (const auto& v : j["scan"]) {
    const std::string spath = path + ".scan[" + std::to_string(i++) + "]";
    const double d = require_number(v, spath);
    if (!std::isfinite(d) || d < 0.0)
      throw ValidationError("response: " + spath + ": must be finite and non-negative");
    if (sensor && d > sensor->max_range + 1e-9)
      throw ValidationError("response: " + spath + ": exceeds max_range");
    f.scan.push_back(d);
  }
  if (sensor && f.scan.size() != static_cast<std::size_t>(sensor->n_rays))
    throw ValidationError("response: " + path + ".scan: expected " +
                          std::to_string(sensor->n_rays) + " rays");
  std::sort(f.observations.begin(), f.observations.end(),
            [](const sim::Observation& a, const sim::Observation& b) { return a.id < b.id; });
  return f;
}

}  // namespace

std::string plan_request_json(const sim::Frame& frame, const std::string& instruction,
                              int horizon_frames) {
  json j;
  j["v"] = 1;
  j["type"] = "plan_request";
  j["instruction"] = instruction;
  j["horizon_frames"] = horizon_frames;
  j["frame"] = frame_to_json(frame);
  return j.dump();
}

imagine::VisualPlan parse_plan_response(const std::string& line, int horizon_frames,
                                        const sim::SensorConfig* sensor) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("response: not valid JSON");
  if (!j.is_object()) throw ProtocolError("response: expected an object");
  if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != 1)
    throw ProtocolError("response: v: expected protocol version 1");
  const std::string type = j.value("type", "");
  if (type == "error")
    throw ProtocolError("response: planner reported: " + j.value("message", "(no message)"));
  if (type != "plan_response") throw ProtocolError("response: type: expected plan_response");
  if (!j.contains("frames") || !j["frames"].is_array()) bad_type("frames", "an array");

  imagine::VisualPlan plan;
  plan.horizon_frames = horizon_frames;
  std::size_t i = 0;
  for (const auto& f : j["frames"])
    plan.frames.push_back(parse_frame(f, "frames[" + std::to_string(i++) + "]", sensor));
  if (plan.frames.size() != static_cast<std::size_t>(horizon_frames) + 1)
    throw ValidationError("response: frames: expected " + std::to_string(horizon_frames + 1) +
                          " frames, got " + std::to_string(plan.frames.size()));
  for (std::size_t k = 1; k < plan.frames.size(); ++k)
    if (plan.frames[k].frame_index <= plan.frames[k - 1].frame_index)
      throw ValidationError("response: frames[" + std::to_string(k) +
                            "].index: not strictly increasing");
  return plan;
}

imagine::VisualPlan request_external_plan(PlanTransport& transport, const sim::Frame& current,
                                          const std::string& instruction, int horizon_frames,
                                          double timeout_s, const sim::SensorConfig* sensor) {
  if (horizon_frames < 1)
    throw std::invalid_argument("request_external_plan: horizon_frames must be >= 1");
  transport.send_line(plan_request_json(current, instruction, horizon_frames));
  const auto line = transport.recv_line(timeout_s);
  if (!line) throw ProtocolError("response: stream closed before a response arrived");
  return parse_plan_response(*line, horizon_frames, sensor);
}

ExternalPlanProvider::ExternalPlanProvider(std::string endpoint, double timeout_s,
                                           sim::SensorConfig sensor, int horizon_frames)
    : endpoint_(std::move(endpoint)), timeout_s_(timeout_s), sensor_(sensor),
      horizon_frames_(horizon_frames) {}

imagine::VisualPlan ExternalPlanProvider::plan(const plan::PlanQuery& query) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!transport_) transport_ = open_endpoint(endpoint_, timeout_s_);
  return request_external_plan(*transport_, query.frame, query.instruction, horizon_frames_,
                               timeout_s_, &sensor_);
}

}  // namespace visnav::wire
