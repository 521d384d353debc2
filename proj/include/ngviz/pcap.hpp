#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ngviz/domain.hpp"

namespace ngviz {

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
inline constexpr std::uint32_t kLinktypeEthernet = 1;
inline constexpr std::uint16_t kDnsPort = 53;
inline constexpr int kMaxPointerHops = 128;

enum class ByteOrder : std::uint8_t { little, big };

struct PcapSource {
    ByteOrder byte_order = ByteOrder::little;
    std::uint32_t snaplen = 0;
    std::uint32_t linktype = 0;
};

struct IngestStats {
    std::uint64_t packets_total = 0;
    std::uint64_t packets_dns = 0;
    std::uint64_t packets_skipped = 0;
    std::map<std::string, std::uint64_t> skip_reasons;

    void skip(const std::string& reason) {
        ++packets_skipped;
        ++skip_reasons[reason];
    }
};

/// Streams DNS question names out of a classic (microsecond) pcap file.
///
/// The global header is validated in the constructor: a wrong magic raises
/// BadMagic, a short header TruncatedHeader, a non-Ethernet link type
/// UnsupportedLinktype. After that next() never throws on packet content;
/// every packet that does not carry a decodable UDP/53 DNS question is
/// counted in stats().skip_reasons instead.
class PcapReader {
public:
    explicit PcapReader(std::istream& in);

    /// Next DNS record in capture order, or nullopt at end of capture.
    std::optional<QueryRecord> next();

    [[nodiscard]] const PcapSource& source() const noexcept { return source_; }
    [[nodiscard]] const IngestStats& stats() const noexcept { return stats_; }

private:
    std::uint32_t read_u32(const std::uint8_t* p) const;

    std::istream& in_;
    PcapSource source_;
    IngestStats stats_;
    std::vector<std::uint8_t> buffer_;
    std::uint64_t next_seq_ = 0;
    bool done_ = false;
};

struct PcapResult {
    PcapSource source;
    std::vector<QueryRecord> records;
    IngestStats stats;
};

PcapResult read_pcap(std::istream& in);
PcapResult read_pcap(std::span<const std::uint8_t> bytes);

struct DomainListResult {
    std::vector<QueryRecord> records;
    std::uint64_t warnings = 0;
};

/// One name per line; '#' comments and blank lines are ignored, lines that
/// fail parse_name() are counted as warnings.
DomainListResult read_domain_list(std::istream& in);

/// Decodes the first question name of a DNS message, following compression
/// pointers. Returns the dotted name, or nullopt with `reason` set to the
/// skip reason.
std::optional<std::string> decode_question_name(std::span<const std::uint8_t> message,
                                                std::string& reason);

// --- writing -------------------------------------------------------------

/// Minimal DNS message: 12-byte header plus one IN/A question.
std::vector<std::uint8_t> encode_dns_question(const QueryName& name, std::uint16_t id,
                                              Direction direction);

struct UdpEndpoints {
    Ipv4 src;
    Ipv4 dst;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
};

/// Ethernet II / IPv4 / UDP frame around `payload`.
std::vector<std::uint8_t> encode_udp_frame(const UdpEndpoints& ep,
                                           std::span<const std::uint8_t> payload);

/// Same as encode_udp_frame() but with IP protocol 6 and a 20-byte TCP header.
std::vector<std::uint8_t> encode_tcp_frame(const UdpEndpoints& ep,
                                           std::span<const std::uint8_t> payload);

class PcapWriter {
public:
    explicit PcapWriter(std::ostream& out, ByteOrder order = ByteOrder::little,
                        std::uint32_t snaplen = 65535);

    void write_packet(Timestamp ts, std::span<const std::uint8_t> frame);

private:
    void put_u32(std::uint32_t v);
    void put_u16(std::uint16_t v);

    std::ostream& out_;
    ByteOrder order_;
};

/// Options for write_query_pcap(). Packet i is sent from client_base with the
/// last octet advanced by (i % client_count), one second apart.
struct QueryPcapOptions {
    Ipv4 client_base{{10, 0, 0, 1}};
    std::uint32_t client_count = 1;
    Ipv4 resolver{{10, 0, 0, 53}};
    Timestamp start{1262304000, 0};
    ByteOrder byte_order = ByteOrder::little;
};

/// One UDP/53 query packet per name.
void write_query_pcap(std::ostream& out, std::span<const QueryName> names,
                      const QueryPcapOptions& options = {});

}  // namespace ngviz
