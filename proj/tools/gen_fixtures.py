#!/usr/bin/env python3
"""Regenerates the frozen encoding and ELF fixtures in tests/fixtures.

Needs clang with the riscv64 target and ld.lld. The outputs are checked
in; the test suite never runs this script.

    python3 tools/gen_fixtures.py
"""
import pathlib
import random
import struct
import subprocess
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"
CLANG = ["clang", "--target=riscv64-unknown-elf", "-march=rv64imfd", "-mno-relax", "-c"]

X = ["zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1"] + [f"a{i}" for i in range(8)] + \
    [f"s{i}" for i in range(2, 12)] + [f"t{i}" for i in range(3, 7)]
F = [f"f{i}" for i in range(32)]

R = ["add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and", "addw", "subw", "sllw", "srlw",
     "sraw", "mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu", "mulw", "divw", "divuw", "remw",
     "remuw"]
I = ["addi", "slti", "sltiu", "xori", "ori", "andi", "addiw"]
SH64 = ["slli", "srli", "srai"]
SH32 = ["slliw", "srliw", "sraiw"]
LOADS = ["lb", "lh", "lw", "ld", "lbu", "lhu", "lwu"]
STORES = ["sb", "sh", "sw", "sd"]
BR = ["beq", "bne", "blt", "bge", "bltu", "bgeu"]
FR = ["fadd", "fsub", "fmul", "fdiv"]
FR_NORM = ["fsgnj", "fsgnjn", "fsgnjx", "fmin", "fmax"]
FCMP = ["feq", "flt", "fle"]
FMA = ["fmadd", "fmsub", "fnmsub", "fnmadd"]
IMMS = [0, 1, -1, 2047, -2048, 100, -100]


def lines(rng):
    out = ["start:"]
    x = lambda: rng.choice(X)
    f = lambda: rng.choice(F)
    for op in R:
        for _ in range(3):
            out.append(f"{op} {x()}, {x()}, {x()}")
    for op in I:
        for imm in IMMS:
            out.append(f"{op} {x()}, {x()}, {imm}")
    for op in SH64:
        for sh in (0, 1, 31, 32, 63):
            out.append(f"{op} {x()}, {x()}, {sh}")
    for op in SH32:
        for sh in (0, 1, 31):
            out.append(f"{op} {x()}, {x()}, {sh}")
    for op in LOADS + ["flw", "fld"]:
        for imm in (0, 8, -8, 2047, -2048):
            dst = f() if op.startswith("f") else x()
            out.append(f"{op} {dst}, {imm}({x()})")
    for op in STORES + ["fsw", "fsd"]:
        for imm in (0, 16, -16, 2047, -2048):
            src = f() if op.startswith("f") else x()
            out.append(f"{op} {src}, {imm}({x()})")
    for imm in (0, 1, 0x7ffff, 0x80000, 0xfffff):
        out.append(f"lui {x()}, {imm}")
        out.append(f"auipc {x()}, {imm}")
    for op in BR:
        out.append(f"{op} {x()}, {x()}, start")
        out.append(f"{op} {x()}, {x()}, end")
    out += [f"jal {x()}, start", f"jal {x()}, end", f"jalr {x()}, 0({x()})", f"jalr {x()}, -2048({x()})",
            f"jalr {x()}, 2047({x()})"]
    out += ["fence", "fence rw, rw", "fence r, w", "fence iorw, iorw", "ecall", "ebreak"]
    for p in ("s", "d"):
        for op in FR:
            for rm in ("", ", rne", ", rtz", ", dyn"):
                out.append(f"{op}.{p} {f()}, {f()}, {f()}{rm}")
        for op in FMA:
            for rm in ("", ", rne"):
                out.append(f"{op}.{p} {f()}, {f()}, {f()}, {f()}{rm}")
        for op in FR_NORM:
            out.append(f"{op}.{p} {f()}, {f()}, {f()}")
        for op in FCMP:
            out.append(f"{op}.{p} {x()}, {f()}, {f()}")
        out.append(f"fsqrt.{p} {f()}, {f()}")
        out.append(f"fclass.{p} {x()}, {f()}")
        for it in ("w", "wu", "l", "lu"):
            out.append(f"fcvt.{it}.{p} {x()}, {f()}, rtz")
            out.append(f"fcvt.{it}.{p} {x()}, {f()}")
            out.append(f"fcvt.{p}.{it} {f()}, {x()}")
    out += [f"fmv.x.w {x()}, {f()}", f"fmv.w.x {f()}, {x()}", f"fmv.x.d {x()}, {f()}", f"fmv.d.x {f()}, {x()}",
            f"fcvt.s.d {f()}, {f()}", f"fcvt.d.s {f()}, {f()}"]
    out.append("end:")
    out.append("nop")
    return out


def text_section(obj: bytes) -> bytes:
    shoff, = struct.unpack_from("<Q", obj, 0x28)
    shentsize, shnum, shstrndx = struct.unpack_from("<HHH", obj, 0x3A)
    sections = [struct.unpack_from("<IIQQQQIIQQ", obj, shoff + i * shentsize) for i in range(shnum)]
    strtab = sections[shstrndx]
    names = obj[strtab[4]:strtab[4] + strtab[5]]
    for s in sections:
        name = names[s[0]:names.index(b"\0", s[0])].decode()
        if name == ".text":
            return obj[s[4]:s[4] + s[5]]
    raise SystemExit("no .text")


def encodings():
    src = "\n".join(lines(random.Random(20240501))) + "\n"
    with tempfile.TemporaryDirectory() as d:
        s = pathlib.Path(d) / "enc.s"
        o = pathlib.Path(d) / "enc.o"
        s.write_text(src)
        subprocess.run(CLANG + [str(s), "-o", str(o)], check=True)
        text = text_section(o.read_bytes())
    words = struct.unpack(f"<{len(text) // 4}I", text)
    (OUT / "encodings.s").write_text(src)
    (OUT / "encodings.hex").write_text("".join(f"{w:08x}\n" for w in words))


ELF_SRC = """
    .section .text
    .globl _start
_start:
    li a0, 6
    li a1, 7
    mul a2, a0, a1
    la t0, result
    sd a2, 0(t0)
    slli t1, a2, 1
    ori t1, t1, 1
    la t0, tohost
    sd t1, 0(t0)
1:  j 1b
    .section .data
    .align 6
    .globl tohost
tohost: .dword 0
    .globl result
result: .dword 0
"""


LINKER_SCRIPT = """
ENTRY(_start)
SECTIONS {
  . = 0x10000;
  .text : { *(.text) }
  . = 0x20000;
  .data : { *(.data) }
}
"""


def elf():
    with tempfile.TemporaryDirectory() as d:
        s = pathlib.Path(d) / "m.s"
        o = pathlib.Path(d) / "m.o"
        s.write_text(ELF_SRC)
        subprocess.run(CLANG + [str(s), "-o", str(o)], check=True)
        ld = pathlib.Path(d) / "m.ld"
        ld.write_text(LINKER_SCRIPT)
        subprocess.run(["ld.lld", "-m", "elf64lriscv", "-static", "--no-relax", "-T", str(ld), str(o), "-o",
                        str(OUT / "minimal.elf")], check=True)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    encodings()
    elf()
