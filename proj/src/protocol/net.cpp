#include "teamsim/protocol/net.hpp"

#include <array>
#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace teamsim::protocol {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class TcpSession : public std::enable_shared_from_this<TcpSession> {
public:
    TcpSession(tcp::socket socket, Hub& hub) : socket_(std::move(socket)), hub_(hub) {}

    void start(std::uint64_t n) {
        std::weak_ptr<TcpSession> weak = shared_from_this();
        id_ = hub_.open("tcp:" + std::to_string(n), [weak, ex = socket_.get_executor()]() {
            asio::post(ex, [weak] {
                if (auto self = weak.lock()) self->flush();
            });
        });
        read();
        flush();
    }

    void shutdown() {
        finish();
        beast::error_code ec;
        socket_.shutdown(tcp::socket::shutdown_both, ec);
        socket_.close(ec);
    }

private:
    void read() {
        socket_.async_read_some(asio::buffer(buffer_), [self = shared_from_this()](beast::error_code ec, std::size_t n) {
            if (ec) return self->finish();
            self->hub_.receive(self->id_, std::string_view(self->buffer_.data(), n));
            self->read();
        });
    }

    void flush() {
        if (writing_ || closed_) return;
        auto frame = hub_.pop(id_);
        if (!frame) return;
        writing_ = true;
        current_ = std::move(frame->bytes);
        asio::async_write(socket_, asio::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) return self->finish();
            self->flush();
        });
    }

    void finish() {
        if (closed_) return;
        closed_ = true;
        hub_.close(id_);
        beast::error_code ec;
        socket_.close(ec);
    }

    tcp::socket socket_;
    Hub& hub_;
    ConnectionId id_{0};
    std::array<char, 16384> buffer_{};
    std::string current_;
    bool writing_{false};
    bool closed_{false};
};

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

    void start(std::uint64_t n) {
        n_ = n;
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->opened();
        });
    }

    void shutdown() {
        finish();
        beast::error_code ec;
        beast::get_lowest_layer(ws_).close(ec);
    }

private:
    void opened() {
        std::weak_ptr<WsSession> weak = shared_from_this();
        id_ = hub_.open("ws:" + std::to_string(n_), [weak, ex = ws_.get_executor()]() {
            asio::post(ex, [weak] {
                if (auto self = weak.lock()) self->flush();
            });
        });
        ws_.text(true);
        read();
        flush();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->finish();
            const auto data = self->buffer_.data();
            self->hub_.receive_frame(self->id_,
                                     std::string_view(static_cast<const char*>(data.data()), data.size()));
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void flush() {
        if (writing_ || closed_ || id_ == 0) return;
        auto frame = hub_.pop(id_);
        if (!frame) return;
        writing_ = true;
        current_ = std::move(frame->bytes);
        if (!current_.empty() && current_.back() == '\n') current_.pop_back();
        ws_.async_write(asio::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) return self->finish();
            self->flush();
        });
    }

    void finish() {
        if (closed_) return;
        closed_ = true;
        if (id_ != 0) hub_.close(id_);
    }

    websocket::stream<tcp::socket> ws_;
    Hub& hub_;
    std::uint64_t n_{0};
    ConnectionId id_{0};
    beast::flat_buffer buffer_;
    std::string current_;
    bool writing_{false};
    bool closed_{false};
};

}  // namespace

struct NetworkServer::Impl {
    Hub& hub;
    ServerConfig config;
    asio::io_context ioc;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    tcp::acceptor tcp_acceptor{ioc};
    tcp::acceptor ws_acceptor{ioc};
    std::thread thread;
    std::uint64_t accepted{0};
    unsigned short tcp_port{0};
    unsigned short ws_port{0};
    std::vector<std::weak_ptr<TcpSession>> tcp_sessions;
    std::vector<std::weak_ptr<WsSession>> ws_sessions;

    Impl(Hub& h, ServerConfig c) : hub(h), config(std::move(c)) {}

    void listen(tcp::acceptor& acceptor, unsigned short port) {
        const tcp::endpoint ep(asio::ip::make_address(config.bind_address), port);
        acceptor.open(ep.protocol());
        acceptor.set_option(asio::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen();
    }

    void accept_tcp() {
        tcp_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            socket.set_option(tcp::no_delay(true));
            auto s = std::make_shared<TcpSession>(std::move(socket), hub);
            tcp_sessions.push_back(s);
            s->start(++accepted);
            accept_tcp();
        });
    }

    void accept_ws() {
        ws_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            socket.set_option(tcp::no_delay(true));
            auto s = std::make_shared<WsSession>(std::move(socket), hub);
            ws_sessions.push_back(s);
            s->start(++accepted);
            accept_ws();
        });
    }
};

NetworkServer::NetworkServer(Hub& hub, ServerConfig config) : impl_(std::make_unique<Impl>(hub, std::move(config))) {}

NetworkServer::~NetworkServer() { stop(); }

void NetworkServer::start() {
    impl_->listen(impl_->tcp_acceptor, impl_->config.tcp_port);
    impl_->tcp_port = impl_->tcp_acceptor.local_endpoint().port();
    impl_->accept_tcp();
    if (impl_->config.enable_ws) {
        impl_->listen(impl_->ws_acceptor, impl_->config.ws_port);
        impl_->ws_port = impl_->ws_acceptor.local_endpoint().port();
        impl_->accept_ws();
    }
    impl_->work.emplace(impl_->ioc.get_executor());
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void NetworkServer::stop() {
    if (!impl_ || !impl_->thread.joinable()) return;
    asio::post(impl_->ioc, [this] {
        beast::error_code ec;
        impl_->tcp_acceptor.close(ec);
        impl_->ws_acceptor.close(ec);
        for (auto& w : impl_->tcp_sessions)
            if (auto s = w.lock()) s->shutdown();
        for (auto& w : impl_->ws_sessions)
            if (auto s = w.lock()) s->shutdown();
        impl_->ioc.stop();
    });
    impl_->work.reset();
    impl_->thread.join();
}

unsigned short NetworkServer::tcp_port() const { return impl_->tcp_port; }

unsigned short NetworkServer::ws_port() const { return impl_->ws_port; }

struct TcpClient::Impl {
    asio::io_context ioc;
    tcp::socket socket{ioc};
    std::thread reader;
    mutable std::mutex mutex;
    std::condition_variable cv;
    FrameDecoder decoder;
    std::vector<Envelope> received;
    std::size_t count{0};
    std::size_t errors{0};
    std::int64_t next_seq{1};
    std::atomic<bool> open{false};

    void read_loop() {
        std::array<char, 16384> buf{};
        for (;;) {
            beast::error_code ec;
            const std::size_t n = socket.read_some(asio::buffer(buf), ec);
            if (ec) break;
            auto results = decoder.feed(std::string_view(buf.data(), n));
            {
                std::lock_guard lock(mutex);
                for (auto& r : results) {
                    if (auto* env = std::get_if<Envelope>(&r)) {
                        received.push_back(std::move(*env));
                        ++count;
                    } else {
                        ++errors;
                    }
                }
            }
            cv.notify_all();
        }
        open = false;
        cv.notify_all();
    }
};

TcpClient::TcpClient() : impl_(std::make_unique<Impl>()) {}

TcpClient::~TcpClient() { close(); }

void TcpClient::connect(const std::string& host, unsigned short port) {
    tcp::resolver resolver(impl_->ioc);
    asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
    impl_->socket.set_option(tcp::no_delay(true));
    impl_->open = true;
    impl_->reader = std::thread([this] { impl_->read_loop(); });
}

void TcpClient::close() {
    if (!impl_) return;
    beast::error_code ec;
    impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
    impl_->socket.close(ec);
    if (impl_->reader.joinable()) impl_->reader.join();
    impl_->open = false;
}

bool TcpClient::connected() const { return impl_->open; }

std::int64_t TcpClient::send(double t, const Payload& payload) {
    const std::int64_t seq = impl_->next_seq++;
    send_raw(encode(Envelope{kProtocolVersion, seq, t, payload}));
    return seq;
}

void TcpClient::send_raw(std::string_view bytes) { asio::write(impl_->socket, asio::buffer(bytes.data(), bytes.size())); }

std::vector<Envelope> TcpClient::take_received() {
    std::lock_guard lock(impl_->mutex);
    std::vector<Envelope> out;
    out.swap(impl_->received);
    return out;
}

bool TcpClient::wait_for_count(std::size_t count, std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mutex);
    return impl_->cv.wait_for(lock, timeout, [&] { return impl_->count >= count || !impl_->open; }) &&
           impl_->count >= count;
}

std::size_t TcpClient::received_count() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->count;
}

std::size_t TcpClient::decode_errors() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->errors;
}

}  // namespace teamsim::protocol
