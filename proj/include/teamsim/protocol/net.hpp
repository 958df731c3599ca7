#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "teamsim/protocol/hub.hpp"

namespace teamsim::protocol {

inline constexpr unsigned short kDefaultTcpPort = 7701;
inline constexpr unsigned short kDefaultWsPort = 7702;

struct ServerConfig {
    std::string bind_address{"127.0.0.1"};
    unsigned short tcp_port{kDefaultTcpPort};  // 0 picks a free port
    unsigned short ws_port{kDefaultWsPort};
    bool enable_ws{true};
};

/// Stream-socket listener and browser WebSocket gateway in front of a Hub.
/// Runs its own I/O thread; every accepted socket becomes a hub connection.
class NetworkServer {
public:
    NetworkServer(Hub& hub, ServerConfig config = {});
    ~NetworkServer();
    NetworkServer(const NetworkServer&) = delete;
    NetworkServer& operator=(const NetworkServer&) = delete;

    /// Binds both listeners and starts the I/O thread. Throws on bind failure.
    void start();
    void stop();

    unsigned short tcp_port() const;
    unsigned short ws_port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocking client for the stream socket. Incoming frames are decoded on a
/// background thread.
class TcpClient {
public:
    TcpClient();
    ~TcpClient();
    TcpClient(const TcpClient&) = delete;
    TcpClient& operator=(const TcpClient&) = delete;

    void connect(const std::string& host, unsigned short port);
    void close();
    bool connected() const;

    /// Stamps the next seq and writes the frame. Returns the seq used.
    std::int64_t send(double t, const Payload& payload);
    void send_raw(std::string_view bytes);

    std::vector<Envelope> take_received();
    /// Waits until at least `count` frames have arrived since connect.
    bool wait_for_count(std::size_t count, std::chrono::milliseconds timeout);
    std::size_t received_count() const;
    std::size_t decode_errors() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace teamsim::protocol
