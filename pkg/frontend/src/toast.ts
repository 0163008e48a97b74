/** Non-blocking notices: transient messages stacked in a corner container.
 * Nothing here ever throws or interrupts input handling. */

import { defaultScheduler, type Scheduler } from "./debounce.js";
import type { NoticeSink } from "./studio.js";

export function createToaster(
  container: HTMLElement,
  lifetimeMs = 5000,
  scheduler: Scheduler = defaultScheduler,
): NoticeSink {
  return {
    notify(message: string): void {
      const el = document.createElement("div");
      el.className = "toast";
      el.textContent = message;
      container.appendChild(el);
      scheduler.schedule(() => {
        el.remove();
      }, lifetimeMs);
    },
  };
}
