#pragma once

// RV64IMFD opcode table.
//
// OP(Enum, asm-name, match, mask, imm-format, rd, rs1, rs2, rs3, has-rm, class)
//
// Register kinds: N none, X integer, F float. Immediate formats follow the base
// ISA encodings; Sh6/Sh5 are the RV64 and *W shift amounts, Fence packs
// pred/succ into imm[7:0].
#define RVMB_OPCODES(OP)                                                               \
  OP(LUI,       "lui",       0x00000037, 0x0000007f, U,    X, N, N, N, 0, IntAlu)       \
  OP(AUIPC,     "auipc",     0x00000017, 0x0000007f, U,    X, N, N, N, 0, IntAlu)       \
  OP(JAL,       "jal",       0x0000006f, 0x0000007f, J,    X, N, N, N, 0, Jump)         \
  OP(JALR,      "jalr",      0x00000067, 0x0000707f, I,    X, X, N, N, 0, Jump)         \
  OP(BEQ,       "beq",       0x00000063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(BNE,       "bne",       0x00001063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(BLT,       "blt",       0x00004063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(BGE,       "bge",       0x00005063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(BLTU,      "bltu",      0x00006063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(BGEU,      "bgeu",      0x00007063, 0x0000707f, B,    N, X, X, N, 0, Branch)       \
  OP(LB,        "lb",        0x00000003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LH,        "lh",        0x00001003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LW,        "lw",        0x00002003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LD,        "ld",        0x00003003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LBU,       "lbu",       0x00004003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LHU,       "lhu",       0x00005003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(LWU,       "lwu",       0x00006003, 0x0000707f, I,    X, X, N, N, 0, MemRead)      \
  OP(SB,        "sb",        0x00000023, 0x0000707f, S,    N, X, X, N, 0, MemWrite)     \
  OP(SH,        "sh",        0x00001023, 0x0000707f, S,    N, X, X, N, 0, MemWrite)     \
  OP(SW,        "sw",        0x00002023, 0x0000707f, S,    N, X, X, N, 0, MemWrite)     \
  OP(SD,        "sd",        0x00003023, 0x0000707f, S,    N, X, X, N, 0, MemWrite)     \
  OP(ADDI,      "addi",      0x00000013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(SLTI,      "slti",      0x00002013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(SLTIU,     "sltiu",     0x00003013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(XORI,      "xori",      0x00004013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(ORI,       "ori",       0x00006013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(ANDI,      "andi",      0x00007013, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(SLLI,      "slli",      0x00001013, 0xfc00707f, Sh6,  X, X, N, N, 0, IntAlu)       \
  OP(SRLI,      "srli",      0x00005013, 0xfc00707f, Sh6,  X, X, N, N, 0, IntAlu)       \
  OP(SRAI,      "srai",      0x40005013, 0xfc00707f, Sh6,  X, X, N, N, 0, IntAlu)       \
  OP(ADD,       "add",       0x00000033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SUB,       "sub",       0x40000033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SLL,       "sll",       0x00001033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SLT,       "slt",       0x00002033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SLTU,      "sltu",      0x00003033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(XOR,       "xor",       0x00004033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SRL,       "srl",       0x00005033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SRA,       "sra",       0x40005033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(OR,        "or",        0x00006033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(AND,       "and",       0x00007033, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(FENCE,     "fence",     0x0000000f, 0xf00fffff, Fence, N, N, N, N, 0, Other)       \
  OP(ECALL,     "ecall",     0x00000073, 0xffffffff, None, N, N, N, N, 0, Other)        \
  OP(EBREAK,    "ebreak",    0x00100073, 0xffffffff, None, N, N, N, N, 0, Other)        \
  OP(ADDIW,     "addiw",     0x0000001b, 0x0000707f, I,    X, X, N, N, 0, IntAlu)       \
  OP(SLLIW,     "slliw",     0x0000101b, 0xfe00707f, Sh5,  X, X, N, N, 0, IntAlu)       \
  OP(SRLIW,     "srliw",     0x0000501b, 0xfe00707f, Sh5,  X, X, N, N, 0, IntAlu)       \
  OP(SRAIW,     "sraiw",     0x4000501b, 0xfe00707f, Sh5,  X, X, N, N, 0, IntAlu)       \
  OP(ADDW,      "addw",      0x0000003b, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SUBW,      "subw",      0x4000003b, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SLLW,      "sllw",      0x0000103b, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SRLW,      "srlw",      0x0000503b, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(SRAW,      "sraw",      0x4000503b, 0xfe00707f, None, X, X, X, N, 0, IntAlu)       \
  OP(MUL,       "mul",       0x02000033, 0xfe00707f, None, X, X, X, N, 0, IntMult)      \
  OP(MULH,      "mulh",      0x02001033, 0xfe00707f, None, X, X, X, N, 0, IntMult)      \
  OP(MULHSU,    "mulhsu",    0x02002033, 0xfe00707f, None, X, X, X, N, 0, IntMult)      \
  OP(MULHU,     "mulhu",     0x02003033, 0xfe00707f, None, X, X, X, N, 0, IntMult)      \
  OP(DIV,       "div",       0x02004033, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(DIVU,      "divu",      0x02005033, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(REM,       "rem",       0x02006033, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(REMU,      "remu",      0x02007033, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(MULW,      "mulw",      0x0200003b, 0xfe00707f, None, X, X, X, N, 0, IntMult)      \
  OP(DIVW,      "divw",      0x0200403b, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(DIVUW,     "divuw",     0x0200503b, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(REMW,      "remw",      0x0200603b, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(REMUW,     "remuw",     0x0200703b, 0xfe00707f, None, X, X, X, N, 0, IntDiv)       \
  OP(FLW,       "flw",       0x00002007, 0x0000707f, I,    F, X, N, N, 0, MemRead)      \
  OP(FSW,       "fsw",       0x00002027, 0x0000707f, S,    N, X, F, N, 0, MemWrite)     \
  OP(FMADD_S,   "fmadd.s",   0x00000043, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FMSUB_S,   "fmsub.s",   0x00000047, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FNMSUB_S,  "fnmsub.s",  0x0000004b, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FNMADD_S,  "fnmadd.s",  0x0000004f, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FADD_S,    "fadd.s",    0x00000053, 0xfe00007f, None, F, F, F, N, 1, FloatAdd)     \
  OP(FSUB_S,    "fsub.s",    0x08000053, 0xfe00007f, None, F, F, F, N, 1, FloatAdd)     \
  OP(FMUL_S,    "fmul.s",    0x10000053, 0xfe00007f, None, F, F, F, N, 1, FloatMult)    \
  OP(FDIV_S,    "fdiv.s",    0x18000053, 0xfe00007f, None, F, F, F, N, 1, FloatDiv)     \
  OP(FSQRT_S,   "fsqrt.s",   0x58000053, 0xfff0007f, None, F, F, N, N, 1, FloatDiv)     \
  OP(FSGNJ_S,   "fsgnj.s",   0x20000053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FSGNJN_S,  "fsgnjn.s",  0x20001053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FSGNJX_S,  "fsgnjx.s",  0x20002053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FMIN_S,    "fmin.s",    0x28000053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FMAX_S,    "fmax.s",    0x28001053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FCVT_W_S,  "fcvt.w.s",  0xc0000053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_WU_S, "fcvt.wu.s", 0xc0100053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_L_S,  "fcvt.l.s",  0xc0200053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_LU_S, "fcvt.lu.s", 0xc0300053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FMV_X_W,   "fmv.x.w",   0xe0000053, 0xfff0707f, None, X, F, N, N, 0, FloatMisc)    \
  OP(FCLASS_S,  "fclass.s",  0xe0001053, 0xfff0707f, None, X, F, N, N, 0, FloatMisc)    \
  OP(FEQ_S,     "feq.s",     0xa0002053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FLT_S,     "flt.s",     0xa0001053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FLE_S,     "fle.s",     0xa0000053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FCVT_S_W,  "fcvt.s.w",  0xd0000053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_S_WU, "fcvt.s.wu", 0xd0100053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_S_L,  "fcvt.s.l",  0xd0200053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_S_LU, "fcvt.s.lu", 0xd0300053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FMV_W_X,   "fmv.w.x",   0xf0000053, 0xfff0707f, None, F, X, N, N, 0, FloatMisc)    \
  OP(FLD,       "fld",       0x00003007, 0x0000707f, I,    F, X, N, N, 0, MemRead)      \
  OP(FSD,       "fsd",       0x00003027, 0x0000707f, S,    N, X, F, N, 0, MemWrite)     \
  OP(FMADD_D,   "fmadd.d",   0x02000043, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FMSUB_D,   "fmsub.d",   0x02000047, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FNMSUB_D,  "fnmsub.d",  0x0200004b, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FNMADD_D,  "fnmadd.d",  0x0200004f, 0x0600007f, None, F, F, F, F, 1, FloatMultAcc) \
  OP(FADD_D,    "fadd.d",    0x02000053, 0xfe00007f, None, F, F, F, N, 1, FloatAdd)     \
  OP(FSUB_D,    "fsub.d",    0x0a000053, 0xfe00007f, None, F, F, F, N, 1, FloatAdd)     \
  OP(FMUL_D,    "fmul.d",    0x12000053, 0xfe00007f, None, F, F, F, N, 1, FloatMult)    \
  OP(FDIV_D,    "fdiv.d",    0x1a000053, 0xfe00007f, None, F, F, F, N, 1, FloatDiv)     \
  OP(FSQRT_D,   "fsqrt.d",   0x5a000053, 0xfff0007f, None, F, F, N, N, 1, FloatDiv)     \
  OP(FSGNJ_D,   "fsgnj.d",   0x22000053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FSGNJN_D,  "fsgnjn.d",  0x22001053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FSGNJX_D,  "fsgnjx.d",  0x22002053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FMIN_D,    "fmin.d",    0x2a000053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FMAX_D,    "fmax.d",    0x2a001053, 0xfe00707f, None, F, F, F, N, 0, FloatMisc)    \
  OP(FCVT_S_D,  "fcvt.s.d",  0x40100053, 0xfff0007f, None, F, F, N, N, 1, FloatMisc)    \
  OP(FCVT_D_S,  "fcvt.d.s",  0x42000053, 0xfff0007f, None, F, F, N, N, 1, FloatMisc)    \
  OP(FEQ_D,     "feq.d",     0xa2002053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FLT_D,     "flt.d",     0xa2001053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FLE_D,     "fle.d",     0xa2000053, 0xfe00707f, None, X, F, F, N, 0, FloatMisc)    \
  OP(FCLASS_D,  "fclass.d",  0xe2001053, 0xfff0707f, None, X, F, N, N, 0, FloatMisc)    \
  OP(FCVT_W_D,  "fcvt.w.d",  0xc2000053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_WU_D, "fcvt.wu.d", 0xc2100053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_L_D,  "fcvt.l.d",  0xc2200053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_LU_D, "fcvt.lu.d", 0xc2300053, 0xfff0007f, None, X, F, N, N, 1, FloatMisc)    \
  OP(FCVT_D_W,  "fcvt.d.w",  0xd2000053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_D_WU, "fcvt.d.wu", 0xd2100053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_D_L,  "fcvt.d.l",  0xd2200053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FCVT_D_LU, "fcvt.d.lu", 0xd2300053, 0xfff0007f, None, F, X, N, N, 1, FloatMisc)    \
  OP(FMV_X_D,   "fmv.x.d",   0xe2000053, 0xfff0707f, None, X, F, N, N, 0, FloatMisc)    \
  OP(FMV_D_X,   "fmv.d.x",   0xf2000053, 0xfff0707f, None, F, X, N, N, 0, FloatMisc)
