#include "trl/nn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "trl/errors.hpp"

namespace trl::nn {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'L', 'Q'};
constexpr uint16_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "parameter block is written as little-endian doubles");

struct Writer {
    std::vector<unsigned char> out;
    void u8(uint8_t v) { out.push_back(v); }
    void u16(uint16_t v) { u8(uint8_t(v & 0xff)); u8(uint8_t(v >> 8)); }
    void u32(uint32_t v) { for (int i = 0; i < 4; ++i) u8(uint8_t(v >> (8 * i))); }
    void f64(double v) {
        unsigned char b[8];
        std::memcpy(b, &v, 8);
        out.insert(out.end(), b, b + 8);
    }
};

struct Reader {
    const std::vector<unsigned char>& in;
    size_t pos = 0;
    void need(size_t n) const {
        if (pos + n > in.size()) throw ModelFormatError("model file truncated");
    }
    uint8_t u8() { need(1); return in[pos++]; }
    uint16_t u16() { uint16_t lo = u8(); return uint16_t(lo | (uint16_t(u8()) << 8)); }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        double v;
        std::memcpy(&v, in.data() + pos, 8);
        pos += 8;
        return v;
    }
};

void write_stack(Writer& w, const std::vector<Layer>& stack) {
    w.u8(uint8_t(stack.size()));
    for (const Layer& l : stack) {
        w.u32(uint32_t(l.in));
        w.u32(uint32_t(l.out));
        w.u8(uint8_t(l.act));
    }
}

std::vector<Layer> read_stack(Reader& r) {
    size_t n = r.u8();
    std::vector<Layer> stack(n);
    for (Layer& l : stack) {
        l.in = int(r.u32());
        l.out = int(r.u32());
        uint8_t act = r.u8();
        if (act > 1) throw ModelFormatError("unknown activation code");
        l.act = Activation(act);
        if (l.in < 1 || l.out < 1 || size_t(l.in) * size_t(l.out) > (1u << 28))
            throw ModelFormatError("implausible layer dimensions");
    }
    return stack;
}

void check_chain(const Network& net) {
    int cur = -1;
    for (const Layer& l : net.trunk) {
        if (cur >= 0 && l.in != cur) throw ModelFormatError("trunk layer dimensions do not chain");
        cur = l.out;
    }
    auto check_head = [cur](const std::vector<Layer>& stack, const char* name) {
        int c = cur;
        for (const Layer& l : stack) {
            if (c >= 0 && l.in != c)
                throw ModelFormatError(std::string(name) + " layer dimensions do not chain");
            c = l.out;
        }
        return c;
    };
    if (net.head == HeadKind::Plain) {
        if (net.plain.size() != 1 || !net.value.empty() || !net.adv.empty())
            throw ModelFormatError("plain head must have exactly one output layer");
        check_head(net.plain, "output");
    } else {
        if (net.value.empty() || net.adv.empty() || !net.plain.empty())
            throw ModelFormatError("dueling head needs value and advantage streams");
        if (check_head(net.value, "value") != 1)
            throw ModelFormatError("value stream must end in a single unit");
        check_head(net.adv, "advantage");
    }
}

}  // namespace

std::vector<unsigned char> serialize_network(const Network& net) {
    Writer w;
    w.out.insert(w.out.end(), kMagic, kMagic + 4);
    w.u16(kVersion);
    w.u8(uint8_t(net.head));
    write_stack(w, net.trunk);
    write_stack(w, net.plain);
    write_stack(w, net.value);
    write_stack(w, net.adv);
    for (const double* p : param_pointers(net)) w.f64(*p);
    return w.out;
}

Network deserialize_network(const std::vector<unsigned char>& bytes) {
    Reader r{bytes};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw ModelFormatError("bad magic, not a model file");
    r.pos = 4;
    if (r.u16() != kVersion) throw ModelFormatError("unsupported model format version");
    uint8_t head = r.u8();
    if (head > 1) throw ModelFormatError("unknown head kind");

    Network net;
    net.head = HeadKind(head);
    net.trunk = read_stack(r);
    net.plain = read_stack(r);
    net.value = read_stack(r);
    net.adv = read_stack(r);
    check_chain(net);

    for (auto* stack : {&net.trunk, &net.plain, &net.value, &net.adv}) {
        for (Layer& l : *stack) {
            l.w.resize(size_t(l.in) * size_t(l.out));
            l.b.resize(size_t(l.out));
        }
    }
    for (double* p : param_pointers(net)) *p = r.f64();
    if (r.pos != bytes.size()) throw ModelFormatError("trailing bytes after parameter block");
    return net;
}

void save_network(const Network& net, const std::string& path) {
    std::vector<unsigned char> bytes = serialize_network(net);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open model file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    return deserialize_network(bytes);
}

}  // namespace trl::nn
