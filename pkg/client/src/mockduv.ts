/**
 * Trivial stand-in for a simulated design: a single 3-bit opcode port whose
 * coverage is the fraction of distinct opcode values observed so far.
 */

export const OPCODE_WIDTH = 3;
export const OPCODE_COUNT = 1 << OPCODE_WIDTH;

export class MockDuv {
  private seen = new Set<number>();

  apply(bits: string): void {
    if (bits.length !== OPCODE_WIDTH || !/^[01]+$/.test(bits)) {
      throw new Error(`opcode stimulus must be ${OPCODE_WIDTH} bits, got "${bits}"`);
    }
    this.seen.add(parseInt(bits, 2));
  }

  /** Fraction of distinct opcodes seen, in [0, 1]. */
  coverage(): number {
    return this.seen.size / OPCODE_COUNT;
  }

  /** Percent with six decimals, the bridge's exact-decimal convention. */
  coverageText(): string {
    return ((this.seen.size * 100) / OPCODE_COUNT).toFixed(6);
  }

  distinctOpcodes(): number {
    return this.seen.size;
  }
}
