import logging


def setup_logger(log_level=logging.INFO, log_file=None):
    logger = logging.getLogger('anisopush')
    logger.setLevel(log_level)
    # commands may be invoked several times in one process (tests), start clean.
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

    c_handler = logging.StreamHandler()
    c_handler.setLevel(log_level)
    c_handler.setFormatter(formatter)
    logger.addHandler(c_handler)

    if log_file:
        f_handler = logging.FileHandler(log_file)
        f_handler.setLevel(log_level)
        f_handler.setFormatter(formatter)
        logger.addHandler(f_handler)

    return logger


def level_from_name(name):
    return getattr(logging, str(name).upper(), logging.INFO)
