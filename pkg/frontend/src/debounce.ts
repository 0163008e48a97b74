/** Trailing-edge debouncer over an injected timer, so tests control time. */

export interface Scheduler {
  schedule(fn: () => void, ms: number): unknown;
  cancel(handle: unknown): void;
}

export const defaultScheduler: Scheduler = {
  schedule: (fn, ms) => setTimeout(fn, ms),
  cancel: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export class Debouncer {
  private handle: unknown = null;

  constructor(
    private readonly delayMs: number,
    private readonly scheduler: Scheduler = defaultScheduler,
  ) {}

  get pending(): boolean {
    return this.handle !== null;
  }

  /** Restart the countdown; `fn` runs once, `delayMs` after the last call. */
  trigger(fn: () => void): void {
    this.cancel();
    this.handle = this.scheduler.schedule(() => {
      this.handle = null;
      fn();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.handle !== null) {
      this.scheduler.cancel(this.handle);
      this.handle = null;
    }
  }
}
