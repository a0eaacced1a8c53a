/**
 * Serializes the UI's asynchronous actions so that chained refreshes run in
 * order and tests can await a stable DOM via idle().
 */
export class TaskQueue {
  private chain: Promise<unknown> = Promise.resolve();
  private pending = 0;

  /** Run `task` after everything queued so far; its result is passed through. */
  run<T>(task: () => Promise<T>): Promise<T> {
    this.pending += 1;
    const result = this.chain.then(task);
    result.finally(() => {
      this.pending -= 1;
    }).catch(() => undefined);
    this.chain = result.catch(() => undefined);
    return result;
  }

  /** Resolves once the queue has drained, including follow-up work queued by tasks. */
  async idle(): Promise<void> {
    while (this.pending > 0) {
      await this.chain;
      // A finished task may have queued more work from a .then handler; give
      // the microtask/timer queues a beat before re-checking.
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
  }
}
