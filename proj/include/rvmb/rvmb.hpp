#pragma once

#include "rvmb/error.hpp"
#include "rvmb/isa/arch_state.hpp"
#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/execute.hpp"
#include "rvmb/isa/fp.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/isa/instruction.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/loader/elf.hpp"
#include "rvmb/loader/exit.hpp"
#include "rvmb/loader/memory_image.hpp"
#include "rvmb/memhier/cache.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/tensorc/interpret.hpp"
#include "rvmb/tensorc/ir.hpp"
#include "rvmb/tensorc/lower.hpp"
#include "rvmb/tensorc/shapes.hpp"
#include "rvmb/tensorc/suite.hpp"
#include "rvmb/tensorc/text.hpp"
#include "rvmb/uarch/atomic.hpp"
#include "rvmb/uarch/latency.hpp"
#include "rvmb/uarch/minor.hpp"
#include "rvmb/uarch/o3.hpp"
#include "rvmb/uarch/predictor.hpp"
#include "rvmb/uarch/timing.hpp"
#include "rvmb/harness/config.hpp"
#include "rvmb/harness/differential.hpp"
#include "rvmb/harness/report.hpp"
#include "rvmb/harness/runner.hpp"
