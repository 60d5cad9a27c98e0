import logging


FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def configure(verbose=False):
    """Attach a single stream handler to the package logger.

    Only command-line entry points call this; library code just logs.

    Parameters
    ----------
    verbose : bool, optional (default: False)
        log at DEBUG instead of INFO

    Returns
    -------
    logging.Logger
    """

    logger = logging.getLogger("cellmix")
    for handler in list(logger.handlers):
        if not isinstance(handler, logging.NullHandler):
            logger.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(FORMAT))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return logger
