import logging
import signal
import threading


class Lifecycle:
    """
    Run lifecycle controller
    Forked and modified from pymaker's Lifecycle: https://github.com/makerdao/pymaker/blob/master/pymaker/lifecycle.py
    Usage:
        with Lifecycle() as lifecycle:
            lifecycle.on_startup(self.write_initial_manifest)
            lifecycle.run(self.execute_pipeline)
            lifecycle.on_shutdown(self.finalize_manifest)
    Note: the pipeline runs once to completion instead of on timers; SIGINT/SIGTERM
    only raise a flag that the pipeline polls through should_stop().
    """

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

        self.startup_function = None
        self.run_function = None
        self.shutdown_function = None

        self.terminated_internally = False
        self.terminated_externally = False
        self.fatal_termination = False
        self.error = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            return False

        previous = self._install_signal_handlers()
        try:
            # Startup phase
            if self.startup_function:
                self.logger.debug("Executing run startup logic...")
                try:
                    self.startup_function()
                except Exception as e:
                    self.fatal_termination = True
                    self.error = e
                    self.logger.exception(f"Run startup failed: {e}")

            # Main phase, skipped after a failed startup
            if self.run_function and not self.fatal_termination:
                try:
                    self.run_function()
                except Exception as e:
                    self.fatal_termination = True
                    self.error = e
                    self.logger.exception(f"Run failed: {e}")

            if self.terminated_externally:
                self.logger.warning("The run is terminating due do SIGINT/SIGTERM signal received")

            # Shutdown phase
            if self.shutdown_function:
                self.logger.debug("Executing run shutdown logic...")
                self.shutdown_function()
                self.logger.debug("Shutdown logic finished")
        finally:
            self._restore_signal_handlers(previous)

        self.logger.info(f"Run terminated with status {self.status}")
        if self.error is not None:
            raise self.error
        return False

    @property
    def status(self) -> str:
        if self.fatal_termination:
            return "failed"
        if self.terminated_internally or self.terminated_externally:
            return "terminated"
        return "ok"

    def on_startup(self, callback):
        """Register the specified callback to be run before the pipeline.

        Args:
            callback: Function to be called on run startup.
        """
        assert callable(callback)

        assert self.startup_function is None
        self.startup_function = callback

    def run(self, callback):
        """Register the pipeline itself.

        Args:
            callback: Function executing the experiment.
        """
        assert callable(callback)

        assert self.run_function is None
        self.run_function = callback

    def on_shutdown(self, callback):
        """Register the specified callback to be run after the pipeline, also when it failed.

        Args:
            callback: Function to be called on run shutdown.
        """
        assert callable(callback)

        assert self.shutdown_function is None
        self.shutdown_function = callback

    def terminate(self, message=None):
        if message is not None:
            self.logger.warning(message)

        self.terminated_internally = True

    def should_stop(self) -> bool:
        return self.terminated_internally or self.terminated_externally

    def _sigint_sigterm_handler(self, sig, frame):
        if self.terminated_externally:
            self.logger.warning("Graceful run termination due to SIGINT/SIGTERM already in progress")
        else:
            self.logger.warning("Run received SIGINT/SIGTERM signal, will stop after the current task")
            self.terminated_externally = True

    def _install_signal_handlers(self):
        # signal handlers can only be set from the main thread
        if threading.current_thread() is not threading.main_thread():
            return None
        previous = (signal.getsignal(signal.SIGINT), signal.getsignal(signal.SIGTERM))
        signal.signal(signal.SIGINT, self._sigint_sigterm_handler)
        signal.signal(signal.SIGTERM, self._sigint_sigterm_handler)
        return previous

    def _restore_signal_handlers(self, previous):
        if previous is None:
            return
        signal.signal(signal.SIGINT, previous[0])
        signal.signal(signal.SIGTERM, previous[1])
