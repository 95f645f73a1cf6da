import { ChatClient } from "./protocol.js";
import { mount } from "./ui.js";
import { ChatViewModel } from "./viewmodel.js";

const SESSION_KEY = "cinebot.session";

const client = new ChatClient("");
const vm = new ChatViewModel(client);
mount(document.getElementById("app")!, vm);

const stored = window.sessionStorage.getItem(SESSION_KEY);
if (stored) {
  // resume the server-persisted session; only the id lives client-side
  void vm.resume(stored).then(() => {
    if (vm.status === "error") {
      window.sessionStorage.removeItem(SESSION_KEY);
      void vm.start();
    }
  });
} else {
  void vm.start();
}

vm.onChange(() => {
  if (vm.sessionId) window.sessionStorage.setItem(SESSION_KEY, vm.sessionId);
});
