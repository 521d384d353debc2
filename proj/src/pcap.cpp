#include "ngviz/pcap.hpp"

#include <algorithm>
#include <sstream>

#include "ngviz/error.hpp"

namespace ngviz {

namespace {

constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;
constexpr std::size_t kEthernetLen = 14;
constexpr std::size_t kUdpHeaderLen = 8;
constexpr std::size_t kDnsHeaderLen = 12;
constexpr std::size_t kMaxWireName = 255;
// Larger records are treated as corruption; the stream cannot be resynced.
constexpr std::uint32_t kMaxRecordLen = 262144;

constexpr std::uint16_t kEthertypeIpv4 = 0x0800;
constexpr std::uint8_t kProtoTcp = 6;
constexpr std::uint8_t kProtoUdp = 17;

std::uint16_t be16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void put_be16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::size_t read_up_to(std::istream& in, std::uint8_t* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount());
}

std::uint16_t ip_checksum(std::span<const std::uint8_t> header) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < header.size(); i += 2) {
        sum += be16(header.data() + i);
    }
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

struct Decoded {
    std::optional<QueryRecord> record;
    std::string skip_reason;
};

Decoded decode_frame(std::span<const std::uint8_t> frame, Timestamp ts) {
    Decoded out;
    auto skip = [&](std::string reason) {
        out.skip_reason = std::move(reason);
        return out;
    };

    if (frame.size() < kEthernetLen) return skip("short-ethernet");
    if (be16(frame.data() + 12) != kEthertypeIpv4) return skip("non-ipv4");

    auto ip = frame.subspan(kEthernetLen);
    if (ip.size() < 20) return skip("short-ip-header");
    if ((ip[0] >> 4) != 4) return skip("non-ipv4");
    const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    const std::size_t ip_total = be16(ip.data() + 2);
    if (ihl < 20 || ihl > ip.size() || ip_total < ihl) return skip("short-ip-header");
    if (ip_total < ip.size()) ip = ip.first(ip_total);  // drop Ethernet padding
    const std::uint16_t frag = be16(ip.data() + 6);
    if ((frag & 0x2000) != 0 || (frag & 0x1fff) != 0) return skip("ip-fragment");
    if (ip[9] != kProtoUdp) return skip("non-udp");

    Ipv4 src;
    Ipv4 dst;
    std::copy_n(ip.data() + 12, 4, src.octets.begin());
    std::copy_n(ip.data() + 16, 4, dst.octets.begin());

    auto udp = ip.subspan(ihl);
    if (udp.size() < kUdpHeaderLen) return skip("short-udp");
    const std::uint16_t sport = be16(udp.data());
    const std::uint16_t dport = be16(udp.data() + 2);
    if (sport != kDnsPort && dport != kDnsPort) return skip("non-dns-port");
    const std::size_t udp_len = be16(udp.data() + 4);
    if (udp_len < kUdpHeaderLen) return skip("short-udp");
    auto dns = udp.subspan(kUdpHeaderLen, std::min(udp_len, udp.size()) - kUdpHeaderLen);

    if (dns.size() < kDnsHeaderLen) return skip("short-dns-header");
    if (be16(dns.data() + 4) == 0) return skip("no-question");
    const bool is_response = (dns[2] & 0x80) != 0;

    std::string reason;
    auto text = decode_question_name(dns, reason);
    if (!text) return skip(reason);

    try {
        out.record = QueryRecord{
            parse_name(*text),
            is_response ? dst : src,
            is_response ? Direction::response : Direction::query,
            ts,
            0,
        };
    } catch (const Error&) {
        return skip("bad-name");
    }
    return out;
}

}  // namespace

std::optional<std::string> decode_question_name(std::span<const std::uint8_t> message,
                                                std::string& reason) {
    std::string name;
    std::size_t pos = kDnsHeaderLen;
    std::size_t wire_len = 0;
    int hops = 0;
    while (true) {
        if (pos >= message.size()) {
            reason = "qname-overrun";
            return std::nullopt;
        }
        const std::uint8_t len = message[pos];
        if ((len & 0xc0) == 0xc0) {
            if (pos + 1 >= message.size()) {
                reason = "qname-overrun";
                return std::nullopt;
            }
            if (++hops > kMaxPointerHops) {
                reason = "pointer-loop";
                return std::nullopt;
            }
            pos = (static_cast<std::size_t>(len & 0x3f) << 8) | message[pos + 1];
            continue;
        }
        if ((len & 0xc0) != 0) {
            reason = "bad-label-type";
            return std::nullopt;
        }
        if (len == 0) break;
        if (pos + 1 + len > message.size()) {
            reason = "qname-overrun";
            return std::nullopt;
        }
        wire_len += 1u + len;
        if (wire_len + 1 > kMaxWireName) {
            reason = "name-too-long";
            return std::nullopt;
        }
        if (!name.empty()) name.push_back('.');
        name.append(reinterpret_cast<const char*>(message.data() + pos + 1), len);
        pos += 1u + len;
    }
    return name;
}

PcapReader::PcapReader(std::istream& in) : in_(in) {
    std::uint8_t header[kGlobalHeaderLen];
    const auto got = read_up_to(in_, header, kGlobalHeaderLen);
    if (got >= 4) {
        if (le32(header) == kPcapMagic) {
            source_.byte_order = ByteOrder::little;
        } else if (be32(header) == kPcapMagic) {
            source_.byte_order = ByteOrder::big;
        } else {
            throw Error(Errc::BadMagic, "not a classic microsecond pcap file");
        }
    }
    if (got < kGlobalHeaderLen) {
        throw Error(Errc::TruncatedHeader,
                    "pcap global header is " + std::to_string(got) + " of 24 bytes");
    }
    source_.snaplen = read_u32(header + 16);
    source_.linktype = read_u32(header + 20);
    if (source_.linktype != kLinktypeEthernet) {
        throw Error(Errc::UnsupportedLinktype,
                    "link type " + std::to_string(source_.linktype) + " is not Ethernet");
    }
}

std::uint32_t PcapReader::read_u32(const std::uint8_t* p) const {
    return source_.byte_order == ByteOrder::little ? le32(p) : be32(p);
}

std::optional<QueryRecord> PcapReader::next() {
    while (!done_) {
        std::uint8_t rec[kRecordHeaderLen];
        const auto got = read_up_to(in_, rec, kRecordHeaderLen);
        if (got == 0) {
            done_ = true;
            break;
        }
        ++stats_.packets_total;
        if (got < kRecordHeaderLen) {
            stats_.skip("truncated-record");
            done_ = true;
            break;
        }
        const Timestamp ts{read_u32(rec), read_u32(rec + 4)};
        const std::uint32_t incl_len = read_u32(rec + 8);
        if (incl_len > kMaxRecordLen) {
            stats_.skip("oversized-record");
            done_ = true;
            break;
        }
        buffer_.resize(incl_len);
        if (read_up_to(in_, buffer_.data(), incl_len) < incl_len) {
            stats_.skip("truncated-record");
            done_ = true;
            break;
        }

        auto decoded = decode_frame(buffer_, ts);
        if (!decoded.record) {
            stats_.skip(decoded.skip_reason);
            continue;
        }
        ++stats_.packets_dns;
        decoded.record->seq = next_seq_++;
        return std::move(decoded.record);
    }
    return std::nullopt;
}

PcapResult read_pcap(std::istream& in) {
    PcapReader reader(in);
    PcapResult result;
    while (auto rec = reader.next()) {
        result.records.push_back(std::move(*rec));
    }
    result.source = reader.source();
    result.stats = reader.stats();
    return result;
}

PcapResult read_pcap(std::span<const std::uint8_t> bytes) {
    std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    return read_pcap(in);
}

DomainListResult read_domain_list(std::istream& in) {
    DomainListResult result;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r\n\f\v");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            result.records.push_back(QueryRecord{
                parse_name(line), Ipv4{}, Direction::query, Timestamp{}, result.records.size()});
        } catch (const Error&) {
            ++result.warnings;
        }
    }
    return result;
}

std::vector<std::uint8_t> encode_dns_question(const QueryName& name, std::uint16_t id,
                                              Direction direction) {
    std::vector<std::uint8_t> msg;
    msg.reserve(kDnsHeaderLen + name.raw().size() + 6);
    put_be16(msg, id);
    // RD set on queries; QR|RD|RA on responses.
    put_be16(msg, direction == Direction::query ? 0x0100 : 0x8180);
    put_be16(msg, 1);
    put_be16(msg, 0);
    put_be16(msg, 0);
    put_be16(msg, 0);

    std::string_view raw = name.raw();
    while (true) {
        const auto dot = raw.find('.');
        const auto label = raw.substr(0, dot);
        msg.push_back(static_cast<std::uint8_t>(label.size()));
        msg.insert(msg.end(), label.begin(), label.end());
        if (dot == std::string_view::npos) break;
        raw.remove_prefix(dot + 1);
    }
    msg.push_back(0);
    put_be16(msg, 1);  // QTYPE A
    put_be16(msg, 1);  // QCLASS IN
    return msg;
}

namespace {

std::vector<std::uint8_t> encode_ip_frame(const UdpEndpoints& ep, std::uint8_t protocol,
                                          std::span<const std::uint8_t> l4) {
    std::vector<std::uint8_t> frame;
    frame.reserve(kEthernetLen + 20 + l4.size());
    const std::uint8_t macs[12] = {0x02, 0, 0, 0, 0, 0x02, 0x02, 0, 0, 0, 0, 0x01};
    frame.insert(frame.end(), std::begin(macs), std::end(macs));
    put_be16(frame, kEthertypeIpv4);

    const std::size_t ip_start = frame.size();
    frame.push_back(0x45);
    frame.push_back(0);
    put_be16(frame, static_cast<std::uint16_t>(20 + l4.size()));
    put_be16(frame, 0);
    put_be16(frame, 0x4000);  // DF
    frame.push_back(64);
    frame.push_back(protocol);
    put_be16(frame, 0);
    frame.insert(frame.end(), ep.src.octets.begin(), ep.src.octets.end());
    frame.insert(frame.end(), ep.dst.octets.begin(), ep.dst.octets.end());
    const auto sum = ip_checksum(std::span(frame).subspan(ip_start, 20));
    frame[ip_start + 10] = static_cast<std::uint8_t>(sum >> 8);
    frame[ip_start + 11] = static_cast<std::uint8_t>(sum & 0xff);

    frame.insert(frame.end(), l4.begin(), l4.end());
    return frame;
}

}  // namespace

std::vector<std::uint8_t> encode_udp_frame(const UdpEndpoints& ep,
                                           std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> udp;
    udp.reserve(kUdpHeaderLen + payload.size());
    put_be16(udp, ep.src_port);
    put_be16(udp, ep.dst_port);
    put_be16(udp, static_cast<std::uint16_t>(kUdpHeaderLen + payload.size()));
    put_be16(udp, 0);  // checksum optional over IPv4
    udp.insert(udp.end(), payload.begin(), payload.end());
    return encode_ip_frame(ep, kProtoUdp, udp);
}

std::vector<std::uint8_t> encode_tcp_frame(const UdpEndpoints& ep,
                                           std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> tcp(20, 0);
    tcp[0] = static_cast<std::uint8_t>(ep.src_port >> 8);
    tcp[1] = static_cast<std::uint8_t>(ep.src_port & 0xff);
    tcp[2] = static_cast<std::uint8_t>(ep.dst_port >> 8);
    tcp[3] = static_cast<std::uint8_t>(ep.dst_port & 0xff);
    tcp[12] = 0x50;  // data offset 5 words
    tcp[13] = 0x18;  // PSH|ACK
    tcp.insert(tcp.end(), payload.begin(), payload.end());
    return encode_ip_frame(ep, kProtoTcp, tcp);
}

PcapWriter::PcapWriter(std::ostream& out, ByteOrder order, std::uint32_t snaplen)
    : out_(out), order_(order) {
    put_u32(kPcapMagic);
    put_u16(2);
    put_u16(4);
    put_u32(0);
    put_u32(0);
    put_u32(snaplen);
    put_u32(kLinktypeEthernet);
}

void PcapWriter::put_u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        const int shift = order_ == ByteOrder::little ? 8 * i : 8 * (3 - i);
        b[i] = static_cast<char>((v >> shift) & 0xff);
    }
    out_.write(b, 4);
}

void PcapWriter::put_u16(std::uint16_t v) {
    char b[2];
    if (order_ == ByteOrder::little) {
        b[0] = static_cast<char>(v & 0xff);
        b[1] = static_cast<char>(v >> 8);
    } else {
        b[0] = static_cast<char>(v >> 8);
        b[1] = static_cast<char>(v & 0xff);
    }
    out_.write(b, 2);
}

void PcapWriter::write_packet(Timestamp ts, std::span<const std::uint8_t> frame) {
    put_u32(ts.seconds);
    put_u32(ts.microseconds);
    put_u32(static_cast<std::uint32_t>(frame.size()));
    put_u32(static_cast<std::uint32_t>(frame.size()));
    out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
    if (!out_) throw Error(Errc::Io, "failed writing pcap packet");
}

void write_query_pcap(std::ostream& out, std::span<const QueryName> names,
                      const QueryPcapOptions& options) {
    PcapWriter writer(out, options.byte_order);
    const std::uint32_t clients = std::max<std::uint32_t>(options.client_count, 1);
    for (std::size_t i = 0; i < names.size(); ++i) {
        UdpEndpoints ep;
        ep.src = options.client_base;
        ep.src.octets[3] = static_cast<std::uint8_t>(ep.src.octets[3] + i % clients);
        ep.dst = options.resolver;
        ep.src_port = static_cast<std::uint16_t>(40000 + i % 20000);
        ep.dst_port = kDnsPort;
        const auto dns = encode_dns_question(names[i], static_cast<std::uint16_t>(i & 0xffff),
                                             Direction::query);
        const Timestamp ts{options.start.seconds + static_cast<std::uint32_t>(i),
                           options.start.microseconds};
        writer.write_packet(ts, encode_udp_frame(ep, dns));
    }
}

}  // namespace ngviz
