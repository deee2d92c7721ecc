"""
Sistema de eventos de domínio.
Permite disparar e escutar eventos (progresso, relatórios) de forma desacoplada.
"""

from typing import Any, Callable


class DomainEvent:
    """Classe base para eventos de domínio."""

    def __init__(self, **kwargs: Any):
        self.data = kwargs

    def __repr__(self):
        return f"{self.__class__.__name__}({self.data})"


class EventBus:
    """
    Barramento de eventos simples (in-memory).
    Cada execução da CLI cria o seu, então não há estado global entre execuções.
    """

    def __init__(self):
        self._handlers: dict[str, list[Callable[[DomainEvent], None]]] = {}

    def subscribe(self, event_type: str, handler: Callable[[DomainEvent], None]):
        """Registra um handler para um tipo de evento."""
        self._handlers.setdefault(event_type, []).append(handler)

    def publish(self, event_type: str, event: DomainEvent):
        """Publica um evento para todos os handlers registrados."""
        for handler in self._handlers.get(event_type, []):
            handler(event)

    def clear(self):
        """Limpa todos os handlers (útil para testes)."""
        self._handlers = {}
