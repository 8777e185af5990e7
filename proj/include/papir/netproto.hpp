// Copyright 2026 The papir authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "papir/schemes.hpp"

namespace papir::net {

// Wire format. Every frame is:
//   1 byte kind | u32 big-endian payload length | payload
//
// kind 0x01 partition query: u16 K, u16 M, then N parts x (M+1) u16
//           indices in canonical order.
// kind 0x02 MDS query:       u16 K, u16 M, u64 q, then K u64 omegas.
// kind 0x03 answer:          u16 combo count, u16 n, u64 q, then
//                            count*n u64 field values.
// kind 0x04 error:           1 reason byte.
//
// All integers big-endian; field elements are fixed-width u64 regardless
// of q. One request per connection.
enum class FrameKind : std::uint8_t {
  query_partition = 0x01,
  query_mds = 0x02,
  answer = 0x03,
  error = 0x04,
};

enum class ErrorReason : std::uint8_t {
  malformed = 0x01,
  unsupported = 0x02,
  oversized = 0x03,
  internal = 0x04,
};

inline constexpr std::uint32_t kMaxFrameBytes = 16u * 1024 * 1024;

struct Frame {
  FrameKind kind = FrameKind::error;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_query_payload(const Query& query);
Query decode_query_payload(FrameKind kind, const std::vector<std::uint8_t>& payload);
FrameKind query_frame_kind(const Query& query);

std::vector<std::uint8_t> encode_answer_payload(const Answer& answer);
Answer decode_answer_payload(const std::vector<std::uint8_t>& payload);

std::vector<std::uint8_t> frame_bytes(FrameKind kind, const std::vector<std::uint8_t>& payload);

// Dataset file: u16 K, u16 n, u64 q, then K*n u64 values, big-endian.
void write_dataset_file(const std::string& path, const Dataset& data);
Dataset read_dataset_file(const std::string& path);

// Side-information file: u16 count, u16 n, u64 q, then per entry a u16
// message id followed by n u64 values, big-endian.
void write_side_info_file(const std::string& path, const SideInfo& side, std::uint32_t n,
                          std::uint64_t q);
SideInfo read_side_info_file(const std::string& path);

// Serves one dataset over TCP. Each connection carries a single query
// frame and receives either an answer or an error frame. The handler sees
// nothing but the query bytes: which message the client wants, or what it
// already holds, never reaches the server.
class Server {
 public:
  Server() = default;
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the accept loop. port 0 picks an ephemeral port.
  void start(Dataset data, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  std::uint16_t port() const { return port_; }
  void stop();
  bool running() const { return running_.load(); }

 private:
  void accept_loop();
  void handle_connection(int fd);

  Dataset data_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::atomic<bool> running_{false};
};

// Computes the answer for one query against a dataset; shared by the
// server and by in-process tests. Throws protocol_error / config_error on
// queries that do not match the dataset.
Answer answer_query(const Query& query, const Dataset& data);

struct FetchResult {
  MessageVector message;
  SchemeKind scheme = SchemeKind::partition_and_code;
  std::uint64_t download_units = 0;
  std::uint64_t answer_payload_bytes = 0;
};

// One full retrieval round over the network: select the scheme with the
// popularity-calibrated probability, send the query, decode the answer.
// Errors are distinct: net_error (transport), protocol_error (framing),
// decode_error (answer inconsistent with the query).
FetchResult fetch(const PopularityProfile& profile, const ProblemParams& params, MessageIndex w,
                  const IndexSet& s, const SideInfo& side_info, const std::string& host,
                  std::uint16_t port, std::uint64_t seed);

}  // namespace papir::net
