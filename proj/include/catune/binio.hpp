#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace catune {

// CRC-32 (IEEE 802.3 polynomial), used as the trailing checksum of every
// binary artifact.
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

// Little-endian byte buffer writer. All numeric payloads in the binary file
// formats are little-endian 64-bit floats / fixed-width ints.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) { append_le(v); }
    void u64(std::uint64_t v) { append_le(v); }
    void i64(std::int64_t v) { append_le(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        append_le(bits);
    }
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }

private:
    template <typename T>
    void append_le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }

    std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader over a byte buffer; throws TruncatedFileError when
// a read runs past the end.
class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
    explicit ByteReader(const std::vector<std::uint8_t>& buf)
        : ByteReader(buf.data(), buf.size()) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() { return read_le<std::uint32_t>(); }
    std::uint64_t u64() { return read_le<std::uint64_t>(); }
    std::int64_t i64() { return static_cast<std::int64_t>(read_le<std::uint64_t>()); }
    double f64() {
        const std::uint64_t bits = read_le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str();

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }

private:
    template <typename T>
    T read_le() {
        const std::uint8_t* p = take(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(p[i]) << (8 * i);
        return v;
    }

    const std::uint8_t* take(std::size_t n);

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

// Whole-file helpers. write_file_atomic writes to <path>.tmp then renames.
std::vector<std::uint8_t> read_file(const std::string& path);
void write_file_atomic(const std::string& path, const void* data, std::size_t size);
void write_file_atomic(const std::string& path, const std::string& text);

// Container envelope shared by the binary artifact formats:
//   magic(8) | version(u32) | payload | crc32(payload)
// Distinct failures: bad magic -> ParseError, wrong version ->
// VersionMismatchError, bad trailing checksum -> ChecksumError, short file ->
// TruncatedFileError.
void write_container(const std::string& path, const char magic[8],
                     std::uint32_t version, const ByteWriter& payload);
std::vector<std::uint8_t> read_container(const std::string& path, const char magic[8],
                                         std::uint32_t expected_version);

}  // namespace catune
