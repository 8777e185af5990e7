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

#include "papir/netproto.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <fstream>
#include <mutex>

#include "papir/rng.hpp"

namespace papir::net {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

// Cursor over a received payload; every read is bounds-checked.
struct Reader {
  const std::vector<std::uint8_t>& data;
  std::size_t pos = 0;

  std::uint16_t u16() {
    require(2);
    std::uint16_t v = static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
    pos += 2;
    return v;
  }

  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data[pos + i];
    pos += 8;
    return v;
  }

  void require(std::size_t bytes) const {
    if (pos + bytes > data.size()) throw protocol_error("payload truncated");
  }

  void done() const {
    if (pos != data.size()) throw protocol_error("payload has trailing bytes");
  }
};

std::uint16_t checked_u16(std::uint64_t v, const char* what) {
  if (v > 0xFFFF) {
    throw usage_error(std::string(what) + " exceeds the wire format's 16-bit range");
  }
  return static_cast<std::uint16_t>(v);
}

}  // namespace

FrameKind query_frame_kind(const Query& query) {
  return std::holds_alternative<PartitionQuery>(query) ? FrameKind::query_partition
                                                       : FrameKind::query_mds;
}

std::vector<std::uint8_t> encode_query_payload(const Query& query) {
  std::vector<std::uint8_t> out;
  if (const auto* pc = std::get_if<PartitionQuery>(&query)) {
    if (pc->parts.empty()) throw usage_error("empty partition query");
    std::uint64_t k = 0;
    for (const auto& part : pc->parts) k += part.size();
    std::uint64_t m = pc->parts.front().size() - 1;
    pc->validate(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(m));
    put_u16(out, checked_u16(k, "K"));
    put_u16(out, checked_u16(m, "M"));
    for (const auto& part : pc->parts) {
      for (MessageIndex i : part) put_u16(out, checked_u16(i, "message index"));
    }
  } else {
    const auto& mds = std::get<MdsQuery>(query);
    mds.validate();
    put_u16(out, checked_u16(mds.k, "K"));
    put_u16(out, checked_u16(mds.m, "M"));
    put_u64(out, mds.q);
    for (std::uint64_t w : mds.omegas) put_u64(out, w);
  }
  return out;
}

Query decode_query_payload(FrameKind kind, const std::vector<std::uint8_t>& payload) {
  Reader r{payload};
  if (kind == FrameKind::query_partition) {
    std::uint32_t k = r.u16();
    std::uint32_t m = r.u16();
    if (k < 2 || m < 1 || m >= k || k % (m + 1) != 0) {
      throw protocol_error("partition query with inconsistent dimensions");
    }
    std::uint32_t parts_n = k / (m + 1);
    std::vector<IndexSet> parts(parts_n);
    for (auto& part : parts) {
      part.resize(m + 1);
      for (auto& idx : part) idx = r.u16();
    }
    r.done();
    PartitionQuery query{std::move(parts)};
    try {
      query.validate(k, m);
    } catch (const usage_error& e) {
      throw protocol_error(std::string("bad partition query: ") + e.what());
    }
    return query;
  }
  if (kind == FrameKind::query_mds) {
    std::uint32_t k = r.u16();
    std::uint32_t m = r.u16();
    std::uint64_t q = r.u64();
    if (k < 2 || m < 1 || m >= k) throw protocol_error("mds query with inconsistent dimensions");
    MdsQuery query{k, m, q, {}};
    query.omegas.resize(k);
    for (auto& w : query.omegas) w = r.u64();
    r.done();
    try {
      query.validate();
    } catch (const usage_error& e) {
      throw protocol_error(std::string("bad mds query: ") + e.what());
    }
    return query;
  }
  throw protocol_error("frame kind is not a query");
}

std::vector<std::uint8_t> encode_answer_payload(const Answer& answer) {
  if (answer.combos.empty()) throw usage_error("empty answer");
  const auto& first = answer.combos.front();
  for (const auto& combo : answer.combos) {
    if (combo.length() != first.length() || combo.modulus() != first.modulus()) {
      throw usage_error("answer combos must share length and field");
    }
  }
  std::vector<std::uint8_t> out;
  put_u16(out, checked_u16(answer.combos.size(), "combo count"));
  put_u16(out, checked_u16(first.length(), "message length"));
  put_u64(out, first.modulus());
  for (const auto& combo : answer.combos) {
    for (std::size_t i = 0; i < combo.length(); ++i) put_u64(out, combo.raw(i));
  }
  return out;
}

Answer decode_answer_payload(const std::vector<std::uint8_t>& payload) {
  Reader r{payload};
  std::uint32_t count = r.u16();
  std::uint32_t n = r.u16();
  std::uint64_t q = r.u64();
  if (count == 0 || n == 0) throw protocol_error("answer with empty dimensions");
  Answer answer;
  answer.combos.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<std::uint64_t> coords(n);
    for (auto& v : coords) {
      v = r.u64();
      if (v >= q) throw protocol_error("answer value outside the field");
    }
    answer.combos.emplace_back(std::move(coords), q);
  }
  r.done();
  return answer;
}

std::vector<std::uint8_t> frame_bytes(FrameKind kind, const std::vector<std::uint8_t>& payload) {
  if (payload.size() > kMaxFrameBytes) throw usage_error("frame payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(5 + payload.size());
  out.push_back(static_cast<std::uint8_t>(kind));
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

namespace {

void write_full(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    ssize_t r = ::write(fd, data, len);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw net_error(std::string("write: ") + std::strerror(errno));
    }
    data += r;
    len -= static_cast<std::size_t>(r);
  }
}

// Returns false on clean EOF at the first byte, throws on mid-read EOF.
bool read_full(int fd, std::uint8_t* data, std::size_t len, bool eof_ok_at_start = false) {
  std::size_t got = 0;
  while (got < len) {
    ssize_t r = ::read(fd, data + got, len - got);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw net_error(std::string("read: ") + std::strerror(errno));
    }
    if (r == 0) {
      if (got == 0 && eof_ok_at_start) return false;
      throw protocol_error("connection closed mid-frame");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

struct RawFrameHeader {
  std::uint8_t kind;
  std::uint32_t length;
};

bool read_header(int fd, RawFrameHeader& hdr, bool eof_ok) {
  std::uint8_t buf[5];
  if (!read_full(fd, buf, 5, eof_ok)) return false;
  hdr.kind = buf[0];
  hdr.length = (std::uint32_t(buf[1]) << 24) | (std::uint32_t(buf[2]) << 16) |
               (std::uint32_t(buf[3]) << 8) | std::uint32_t(buf[4]);
  return true;
}

Frame read_frame(int fd, bool eof_ok = false) {
  RawFrameHeader hdr{};
  if (!read_header(fd, hdr, eof_ok)) throw protocol_error("connection closed before frame");
  if (hdr.length > kMaxFrameBytes) throw protocol_error("frame exceeds the 16 MiB cap");
  Frame frame;
  frame.kind = static_cast<FrameKind>(hdr.kind);
  frame.payload.resize(hdr.length);
  if (hdr.length > 0) read_full(fd, frame.payload.data(), hdr.length);
  return frame;
}

void write_frame(int fd, FrameKind kind, const std::vector<std::uint8_t>& payload) {
  auto bytes = frame_bytes(kind, payload);
  write_full(fd, bytes.data(), bytes.size());
}

void write_error_frame(int fd, ErrorReason reason) {
  std::vector<std::uint8_t> payload{static_cast<std::uint8_t>(reason)};
  try {
    write_frame(fd, FrameKind::error, payload);
  } catch (const error&) {
    // Peer already gone; nothing more to do.
  }
}

class FdGuard {
 public:
  explicit FdGuard(int fd) : fd_(fd) {}
  ~FdGuard() {
    if (fd_ >= 0) ::close(fd_);
  }
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

int connect_to(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  std::string port_str = std::to_string(port);
  int rc = ::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &result);
  if (rc != 0) throw net_error("cannot resolve " + host + ": " + gai_strerror(rc));

  int fd = -1;
  std::string last_error = "no addresses";
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) {
    throw net_error("cannot connect to " + host + ":" + port_str + ": " + last_error);
  }
  return fd;
}

void write_be_u16(std::ofstream& out, std::uint16_t v) {
  std::uint8_t buf[2] = {static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  out.write(reinterpret_cast<const char*>(buf), 2);
}

void write_be_u64(std::ofstream& out, std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint16_t read_be_u16(std::ifstream& in, const std::string& path) {
  std::uint8_t buf[2];
  if (!in.read(reinterpret_cast<char*>(buf), 2)) throw io_error("truncated file: " + path);
  return static_cast<std::uint16_t>((buf[0] << 8) | buf[1]);
}

std::uint64_t read_be_u64(std::ifstream& in, const std::string& path) {
  std::uint8_t buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw io_error("truncated file: " + path);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace

void write_dataset_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  write_be_u16(out, checked_u16(data.k(), "K"));
  write_be_u16(out, checked_u16(data.n(), "n"));
  write_be_u64(out, data.q());
  for (const auto& msg : data.messages()) {
    for (std::size_t i = 0; i < msg.length(); ++i) write_be_u64(out, msg.raw(i));
  }
  if (!out) throw io_error("write failed: " + path);
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open dataset file: " + path);
  std::uint16_t k = read_be_u16(in, path);
  std::uint16_t n = read_be_u16(in, path);
  std::uint64_t q = read_be_u64(in, path);
  if (k == 0 || n == 0) throw io_error("dataset file with empty dimensions: " + path);
  if (!is_prime_u64(q)) throw io_error("dataset file with non-prime field: " + path);
  std::vector<MessageVector> messages;
  messages.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    std::vector<std::uint64_t> coords(n);
    for (auto& v : coords) {
      v = read_be_u64(in, path);
      if (v >= q) throw io_error("dataset value outside the field: " + path);
    }
    messages.emplace_back(std::move(coords), q);
  }
  char extra;
  if (in.read(&extra, 1)) throw io_error("dataset file has trailing bytes: " + path);
  return Dataset(std::move(messages));
}

void write_side_info_file(const std::string& path, const SideInfo& side, std::uint32_t n,
                          std::uint64_t q) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  write_be_u16(out, checked_u16(side.size(), "entry count"));
  write_be_u16(out, checked_u16(n, "n"));
  write_be_u64(out, q);
  for (const auto& [id, msg] : side) {
    if (msg.length() != n || msg.modulus() != q) {
      throw usage_error("side information entries must share length and field");
    }
    write_be_u16(out, checked_u16(id, "message id"));
    for (std::size_t i = 0; i < msg.length(); ++i) write_be_u64(out, msg.raw(i));
  }
  if (!out) throw io_error("write failed: " + path);
}

SideInfo read_side_info_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open side information file: " + path);
  std::uint16_t count = read_be_u16(in, path);
  std::uint16_t n = read_be_u16(in, path);
  std::uint64_t q = read_be_u64(in, path);
  if (n == 0 || !is_prime_u64(q)) throw io_error("bad side information header: " + path);
  SideInfo side;
  for (std::uint32_t e = 0; e < count; ++e) {
    std::uint16_t id = read_be_u16(in, path);
    std::vector<std::uint64_t> coords(n);
    for (auto& v : coords) {
      v = read_be_u64(in, path);
      if (v >= q) throw io_error("side information value outside the field: " + path);
    }
    if (!side.emplace(id, MessageVector(std::move(coords), q)).second) {
      throw io_error("duplicate side information id in " + path);
    }
  }
  return side;
}

Answer answer_query(const Query& query, const Dataset& data) {
  if (const auto* pc = std::get_if<PartitionQuery>(&query)) {
    if (pc->parts.empty() || pc->parts.front().empty()) {
      throw protocol_error("empty partition query");
    }
    std::uint64_t total = 0;
    for (const auto& part : pc->parts) total += part.size();
    if (total != data.k()) {
      throw config_error("partition query covers " + std::to_string(total) +
                         " messages, dataset has " + std::to_string(data.k()));
    }
    return pc_answer(*pc, data);
  }
  const auto& mds = std::get<MdsQuery>(query);
  if (mds.k != data.k()) {
    throw config_error("mds query K does not match the dataset");
  }
  if (mds.q != data.q()) {
    throw config_error("mds query field does not match the dataset");
  }
  return mds_answer(mds, data);
}

Server::~Server() { stop(); }

void Server::start(Dataset data, const std::string& host, std::uint16_t port) {
  if (running_.load()) throw usage_error("server already running");
  data_ = std::move(data);

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw net_error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw net_error("bad listen address: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw net_error("bind " + host + ":" + std::to_string(port) + ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::listen(listen_fd_, 64) != 0) {
    std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw net_error("listen: " + msg);
  }

  running_.store(true);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  // Small fixed pool; connections are single-request so workers turn over
  // quickly while still letting clients proceed in parallel.
  constexpr std::size_t kWorkers = 4;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<int> pending;
  bool closed = false;

  for (std::size_t i = 0; i < kWorkers; ++i) {
    workers_.emplace_back([&] {
      for (;;) {
        int fd;
        {
          std::unique_lock<std::mutex> lock(mu);
          cv.wait(lock, [&] { return closed || !pending.empty(); });
          if (pending.empty()) return;
          fd = pending.front();
          pending.pop_front();
        }
        handle_connection(fd);
      }
    });
  }

  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;  // listen socket closed by stop()
    }
    {
      std::lock_guard<std::mutex> lock(mu);
      pending.push_back(fd);
    }
    cv.notify_one();
  }

  {
    std::lock_guard<std::mutex> lock(mu);
    closed = true;
  }
  cv.notify_all();
  for (auto& w : workers_) w.join();
  workers_.clear();
}

void Server::handle_connection(int fd) {
  FdGuard guard(fd);
  try {
    RawFrameHeader hdr{};
    if (!read_header(fd, hdr, /*eof_ok=*/true)) return;
    if (hdr.length > kMaxFrameBytes) {
      write_error_frame(fd, ErrorReason::oversized);
      return;
    }
    std::vector<std::uint8_t> payload(hdr.length);
    if (hdr.length > 0) read_full(fd, payload.data(), hdr.length);

    FrameKind kind = static_cast<FrameKind>(hdr.kind);
    if (kind != FrameKind::query_partition && kind != FrameKind::query_mds) {
      write_error_frame(fd, ErrorReason::malformed);
      return;
    }
    Query query = decode_query_payload(kind, payload);
    Answer answer = answer_query(query, data_);
    write_frame(fd, FrameKind::answer, encode_answer_payload(answer));
  } catch (const protocol_error&) {
    write_error_frame(fd, ErrorReason::malformed);
  } catch (const config_error&) {
    write_error_frame(fd, ErrorReason::unsupported);
  } catch (const net_error&) {
    // Peer vanished; drop the connection.
  } catch (const error&) {
    write_error_frame(fd, ErrorReason::internal);
  }
}

void Server::stop() {
  if (!running_.load()) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (accept_thread_.joinable()) accept_thread_.join();
  listen_fd_ = -1;
  running_.store(false);
}

FetchResult fetch(const PopularityProfile& profile, const ProblemParams& params, MessageIndex w,
                  const IndexSet& s, const SideInfo& side_info, const std::string& host,
                  std::uint16_t port, std::uint64_t seed) {
  params.require_rcs();
  DemandRealization real = DemandRealization::make(w, s, params);
  for (MessageIndex i : real.s) {
    auto it = side_info.find(i);
    if (it == side_info.end()) {
      throw usage_error("missing side information for message " + std::to_string(i));
    }
    if (it->second.length() != params.n || it->second.modulus() != params.q) {
      throw usage_error("side information does not match the problem parameters");
    }
  }

  Rational gamma = rcs_gamma(profile, params, real.w, real.s);
  Rng rng(seed);
  bool pick_partition = exact_bernoulli(gamma, rng.next_u64());

  Query query;
  std::size_t demand_part = 0;
  std::uint32_t expected_combos;
  if (pick_partition) {
    PcQuery pc = pc_build_query(params, real.w, real.s, derive_seed(seed, 1));
    demand_part = pc.demand_part;
    expected_combos = params.parts();
    query = std::move(pc.query);
  } else {
    query = mds_build_query(params);
    expected_combos = params.k - params.m;
  }

  FdGuard fd(connect_to(host, port));
  write_frame(fd.get(), query_frame_kind(query), encode_query_payload(query));
  Frame reply = read_frame(fd.get());

  if (reply.kind == FrameKind::error) {
    std::string reason = reply.payload.empty()
                             ? std::string("unknown")
                             : std::to_string(static_cast<int>(reply.payload[0]));
    throw protocol_error("server rejected the query (reason " + reason + ")");
  }
  if (reply.kind != FrameKind::answer) throw protocol_error("unexpected frame kind in reply");

  Answer answer = decode_answer_payload(reply.payload);
  if (answer.combos.size() != expected_combos) {
    throw decode_error("answer has " + std::to_string(answer.combos.size()) +
                       " combos, expected " + std::to_string(expected_combos));
  }
  if (answer.combos.front().length() != params.n || answer.combos.front().modulus() != params.q) {
    throw decode_error("answer dimensions do not match the problem parameters");
  }

  FetchResult result;
  result.scheme = pick_partition ? SchemeKind::partition_and_code : SchemeKind::mds_code;
  result.download_units = answer.combos.size();
  result.answer_payload_bytes = reply.payload.size();
  if (pick_partition) {
    result.message = pc_decode(answer, demand_part, real.s, side_info);
  } else {
    result.message = mds_decode(answer, std::get<MdsQuery>(query), real.w, real.s, side_info);
  }
  return result;
}

}  // namespace papir::net
