#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <sys/types.h>
#include <vector>

#include "visnav/imaginer.hpp"
#include "visnav/planner.hpp"

namespace visnav::wire {

// One duplex newline-delimited byte stream. recv_line strips the trailing
// newline; it throws TimeoutError past the deadline and ProtocolError when
// the stream closes mid-line. nullopt signals a clean EOF.
class PlanTransport {
 public:
  virtual ~PlanTransport() = default;
  virtual void send_line(const std::string& line) = 0;
  virtual std::optional<std::string> recv_line(double timeout_s) = 0;
};

// Poll-based transport over a pair of file descriptors; owns and closes them.
class FdTransport : public PlanTransport {
 public:
  FdTransport(int read_fd, int write_fd);
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  void send_line(const std::string& line) override;
  std::optional<std::string> recv_line(double timeout_s) override;

 private:
  int read_fd_;
  int write_fd_;
  std::string buf_;
};

// Spawns argv[0] with the remaining arguments; the child's stdin/stdout
// become the stream. The child is reaped on destruction.
class SubprocessTransport : public PlanTransport {
 public:
  explicit SubprocessTransport(const std::vector<std::string>& argv);
  ~SubprocessTransport() override;

  void send_line(const std::string& line) override;
  std::optional<std::string> recv_line(double timeout_s) override;

 private:
  pid_t pid_ = -1;
  std::unique_ptr<FdTransport> stream_;
};

std::unique_ptr<PlanTransport> connect_tcp(const std::string& host, int port, double timeout_s);

// endpoint forms: "tcp:HOST:PORT" or "exec:CMD [ARG...]"
std::unique_ptr<PlanTransport> open_endpoint(const std::string& endpoint, double timeout_s);

std::string plan_request_json(const sim::Frame& frame, const std::string& instruction,
                              int horizon_frames);

// Validates the response against the frame invariants; errors carry the
// offending field path. The optional sensor config tightens range / bearing /
// scan-size checks to the local sensor model.
imagine::VisualPlan parse_plan_response(const std::string& line, int horizon_frames,
                                        const sim::SensorConfig* sensor = nullptr);

// One request, one response.
imagine::VisualPlan request_external_plan(PlanTransport& transport, const sim::Frame& current,
                                          const std::string& instruction, int horizon_frames,
                                          double timeout_s,
                                          const sim::SensorConfig* sensor = nullptr);

// Plan provider backed by a remote generator; connects lazily and holds one
// connection, serializing in-flight requests.
class ExternalPlanProvider : public plan::PlanProvider {
 public:
  ExternalPlanProvider(std::string endpoint, double timeout_s, sim::SensorConfig sensor,
                       int horizon_frames);

  imagine::VisualPlan plan(const plan::PlanQuery& query) override;

 private:
  std::string endpoint_;
  double timeout_s_;
  sim::SensorConfig sensor_;
  int horizon_frames_;
  std::mutex mutex_;
  std::unique_ptr<PlanTransport> transport_;
};

}  // namespace visnav::wire
