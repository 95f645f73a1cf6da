// DOM rendering: one render pass per view-model change.

import { ChatViewModel } from "./viewmodel.js";

export function mount(root: HTMLElement, vm: ChatViewModel): void {
  root.innerHTML = `
    <div class="chat">
      <header class="chat-header">
        <span class="title">Movie recommender</span>
        <span class="status" data-role="status"></span>
      </header>
      <div class="messages" data-role="messages"></div>
      <div class="recap" data-role="recap"></div>
      <div class="error-banner hidden" data-role="error">
        <span data-role="error-text"></span>
        <button data-role="retry">Retry</button>
      </div>
      <div class="buttons" data-role="buttons"></div>
      <form class="composer" data-role="composer">
        <input type="text" data-role="input" placeholder="Describe a movie you feel like watching..." autocomplete="off" />
        <button type="submit" data-role="send">Send</button>
      </form>
    </div>
  `;

  const messagesEl = root.querySelector<HTMLElement>('[data-role="messages"]')!;
  const buttonsEl = root.querySelector<HTMLElement>('[data-role="buttons"]')!;
  const statusEl = root.querySelector<HTMLElement>('[data-role="status"]')!;
  const recapEl = root.querySelector<HTMLElement>('[data-role="recap"]')!;
  const errorEl = root.querySelector<HTMLElement>('[data-role="error"]')!;
  const errorTextEl = root.querySelector<HTMLElement>('[data-role="error-text"]')!;
  const retryEl = root.querySelector<HTMLButtonElement>('[data-role="retry"]')!;
  const form = root.querySelector<HTMLFormElement>('[data-role="composer"]')!;
  const input = root.querySelector<HTMLInputElement>('[data-role="input"]')!;
  const sendEl = root.querySelector<HTMLButtonElement>('[data-role="send"]')!;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    input.value = "";
    void vm.sendText(text);
  });
  retryEl.addEventListener("click", () => {
    void vm.lastError?.retry();
  });

  function render(): void {
    statusEl.textContent = vm.status;
    statusEl.dataset.status = vm.status;

    messagesEl.innerHTML = "";
    for (const message of vm.messages) {
      const bubble = document.createElement("div");
      bubble.className = `bubble ${message.author}`;
      bubble.textContent = message.text;
      messagesEl.appendChild(bubble);
      if (message.card) {
        const card = document.createElement("div");
        card.className = "card";
        card.innerHTML = `
          <img alt="" src="${message.card.cover_url}" onerror="this.style.display='none'"/>
          <div class="card-body">
            <div class="card-title"></div>
            <div class="card-meta"></div>
            <div class="card-plot"></div>
            <a target="_blank" rel="noreferrer"></a>
          </div>`;
        card.querySelector(".card-title")!.textContent =
          `${message.card.title} (${message.card.year})`;
        card.querySelector(".card-meta")!.textContent = `Rating ${message.card.rating} / 10`;
        card.querySelector(".card-plot")!.textContent = message.card.plot;
        const link = card.querySelector("a")!;
        link.href = message.card.item_url;
        link.textContent = "Details";
        messagesEl.appendChild(card);
      }
    }
    messagesEl.scrollTop = messagesEl.scrollHeight;

    recapEl.textContent = vm.recap ?? "";
    recapEl.classList.toggle("hidden", !vm.recap);

    errorEl.classList.toggle("hidden", !vm.lastError);
    errorTextEl.textContent = vm.lastError?.message ?? "";

    buttonsEl.innerHTML = "";
    vm.buttons.forEach((button, index) => {
      const el = document.createElement("button");
      el.className = "quick-reply";
      el.textContent = button.label;
      el.disabled = vm.busy;
      el.addEventListener("click", () => void vm.sendButton(index));
      buttonsEl.appendChild(el);
    });

    const locked = vm.busy || vm.status === "closed";
    input.disabled = locked;
    sendEl.disabled = locked;
  }

  vm.onChange(render);
  render();
}
